// Independent reference implementations shared by the unit tests and the acceptance run.
#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "affpop/harmony.hpp"

namespace affpop::oracle {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(AFFPOP_TEST_DATA) / name; }

// Independent dissimilarity: pad the shorter list with its top note.
inline int oracle_distance(std::vector<int> a, std::vector<int> b) {
  while (a.size() < b.size()) a.push_back(a.back());
  while (b.size() < a.size()) b.push_back(b.back());
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
  return d;
}

struct OracleVoicing {
  std::vector<int> notes;
  int inversion;
};

// Every ascending note set within one octave of its bass (bass in [lo, hi]) that
// spells exactly the chord's pitch classes once each.
inline std::vector<OracleVoicing> enumerate_voicings(const Chord& chord, int lo, int hi) {
  const auto tones = chord_tones(chord);
  const std::set<int> pcs(tones.begin(), tones.end());
  const int k = static_cast<int>(tones.size());
  std::vector<OracleVoicing> out;
  for (int bass = lo; bass <= hi; ++bass) {
    if (!pcs.contains(((bass % 12) + 12) % 12)) continue;
    // choose k-1 notes out of bass+1 .. bass+11 by bitmask
    for (int mask = 0; mask < (1 << 11); ++mask) {
      if (__builtin_popcount(static_cast<unsigned>(mask)) != k - 1) continue;
      std::vector<int> notes{bass};
      for (int i = 0; i < 11; ++i)
        if (mask & (1 << i)) notes.push_back(bass + 1 + i);
      std::set<int> got;
      for (int n : notes) got.insert(n % 12);
      if (got != pcs) continue;
      const int inv = static_cast<int>(std::find(tones.begin(), tones.end(), bass % 12) - tones.begin());
      out.push_back({notes, inv});
    }
  }
  return out;
}

inline OracleVoicing oracle_best(const std::vector<int>& prev, const Chord& chord, int lo, int hi) {
  auto all = enumerate_voicings(chord, lo, hi);
  std::sort(all.begin(), all.end(), [&](const OracleVoicing& a, const OracleVoicing& b) {
    const int da = oracle_distance(prev, a.notes), db = oracle_distance(prev, b.notes);
    if (da != db) return da < db;
    if (a.notes[0] != b.notes[0]) return a.notes[0] < b.notes[0];
    return a.inversion < b.inversion;
  });
  return all.front();
}

// Reads the fixture by hand and solves the normal equations on raw moments.
struct OracleFit {
  double slope, intercept, r2;
};

inline OracleFit reference_fit(const std::filesystem::path& file, const std::string& dim) {
  std::ifstream in(file);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> head;
  std::stringstream hs(line);
  for (std::string c; std::getline(hs, c, ',');) head.push_back(c);
  const auto tcol = std::find(head.begin(), head.end(), "target_" + dim) - head.begin();
  const auto rcol = std::find(head.begin(), head.end(), "rated_" + dim) - head.begin();
  std::map<double, std::pair<double, int>> acc;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    auto& [sum, n] = acc[std::stod(cells[tcol])];
    sum += (std::stoi(cells[rcol]) - 1) / 8.0;
    ++n;
  }
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (const auto& [x, s] : acc) {
    const double y = s.first / s.second;
    n += 1;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double det = n * sxx - sx * sx;
  const double b = (n * sxy - sx * sy) / det;
  const double a = (sxx * sy - sx * sxy) / det;
  const double r = (n * sxy - sx * sy) / std::sqrt(det * (n * syy - sy * sy));
  return {b, a, r * r};
}

struct Frozen {
  const char* file;
  const char* dim;
  double slope, intercept, r2, p;
};

// scipy.stats.linregress on the per-target means of each fixture
inline const Frozen kFrozen[] = {
    {"ratings_strong.csv", "valence", 0.8793981481481481, 0.05324074074074081, 0.9994095254820187, 6.090704840956126e-06},
    {"ratings_strong.csv", "arousal", 0.7909722222222224, 0.10370370370370369, 0.9995768280889583, 3.6950409551243476e-06},
    {"ratings_weak.csv", "valence", 0.29513888888888895, 0.35555555555555557, 0.9664620932833228, 0.002633419241559717},
    {"ratings_weak.csv", "arousal", 0.4767361111111111, 0.2395833333333333, 0.9678088254017798, 0.0024753765504667196},
    {"ratings_noisy.csv", "valence", 0.5283333333333333, 0.2515277777777778, 0.9969951828672233, 6.996935675085089e-05},
    {"ratings_noisy.csv", "arousal", 0.12694444444444447, 0.45499999999999996, 0.6179476406329517, 0.11487106670462983},
};

}  // namespace affpop::oracle
