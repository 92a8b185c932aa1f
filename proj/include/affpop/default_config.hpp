/**
 * @file default_config.hpp
 * @brief Compiled-in default tables. data/default_config.json is a dump of these.
 *
 * The chord, melody and rhythm tables are authored stand-ins in a 60s/70s pop idiom.
 * Musicians are expected to replace them through the config file.
 */
#pragma once

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "affpop/config.hpp"

namespace affpop {

namespace defaults {

inline RegionSpec valence_bands() { return RegionSpec::from_cuts({"low", "high"}, {0.5}, {false}); }

// Strummed: low < 0.4 <= moderate < 0.7 <= high
inline RegionSpec strummed_regions() {
  return RegionSpec::from_cuts({"low", "moderate", "high"}, {0.4, 0.7}, {true, true});
}
// Percussion: low <= 0.3 < moderate <= 0.7 < high
inline RegionSpec percussion_regions() {
  return RegionSpec::from_cuts({"low", "moderate", "high"}, {0.3, 0.7}, {false, false});
}
// Melody motifs: low < 0.3 <= moderate < 0.6 <= high
inline RegionSpec motif_regions() {
  return RegionSpec::from_cuts({"low", "moderate", "high"}, {0.3, 0.6}, {true, true});
}

struct VertexSpec {
  const char* name;
  int root;
  Quality quality;
  const char* function;
  double weight_low;   // share within its function, low-valence band
  double weight_high;  // share within its function, high-valence band
};

inline constexpr std::array<VertexSpec, 16> kVertices = {{
    {"C", 0, Quality::major, "I", 0.50, 0.55},
    {"Cmaj7", 0, Quality::major7, "I", 0.10, 0.40},
    {"Cm", 0, Quality::minor, "I", 0.40, 0.05},
    {"Dm", 2, Quality::minor, "ii", 0.40, 0.50},
    {"Dm7", 2, Quality::minor7, "ii", 0.30, 0.45},
    {"Ddim", 2, Quality::diminished, "ii", 0.30, 0.05},
    {"Em", 4, Quality::minor, "iii", 0.50, 0.50},
    {"Em7", 4, Quality::minor7, "iii", 0.50, 0.50},
    {"F", 5, Quality::major, "IV", 0.30, 0.55},
    {"Fmaj7", 5, Quality::major7, "IV", 0.20, 0.40},
    {"Fm", 5, Quality::minor, "IV", 0.50, 0.05},
    {"G", 7, Quality::major, "V", 0.40, 0.50},
    {"G7", 7, Quality::dominant7, "V", 0.30, 0.45},
    {"Bdim", 11, Quality::diminished, "V", 0.30, 0.05},
    {"Am", 9, Quality::minor, "vi", 0.50, 0.50},
    {"Am7", 9, Quality::minor7, "vi", 0.50, 0.50},
}};

using FunctionTable = std::map<std::string, std::map<std::string, double>>;

// Function-level transition probabilities. The low band leans on the minor degrees.
inline FunctionTable low_functions() {
  return {
      {"I", {{"vi", 0.40}, {"IV", 0.20}, {"ii", 0.15}, {"iii", 0.10}, {"V", 0.05}, {"I", 0.10}}},
      {"ii", {{"V", 0.45}, {"vi", 0.25}, {"IV", 0.15}, {"I", 0.15}}},
      {"iii", {{"vi", 0.60}, {"IV", 0.20}, {"ii", 0.20}}},
      {"IV", {{"V", 0.30}, {"ii", 0.20}, {"vi", 0.25}, {"I", 0.25}}},
      {"V", {{"vi", 0.35}, {"I", 0.30}, {"IV", 0.20}, {"iii", 0.15}}},
      {"vi", {{"ii", 0.35}, {"IV", 0.30}, {"iii", 0.15}, {"V", 0.20}}},
  };
}

inline FunctionTable high_functions() {
  return {
      {"I", {{"IV", 0.35}, {"V", 0.20}, {"vi", 0.20}, {"ii", 0.10}, {"iii", 0.05}, {"I", 0.10}}},
      {"ii", {{"V", 0.60}, {"IV", 0.15}, {"vi", 0.10}, {"I", 0.15}}},
      {"iii", {{"vi", 0.50}, {"IV", 0.30}, {"ii", 0.20}}},
      {"IV", {{"V", 0.40}, {"I", 0.30}, {"ii", 0.15}, {"vi", 0.15}}},
      {"V", {{"I", 0.50}, {"vi", 0.15}, {"IV", 0.20}, {"iii", 0.15}}},
      {"vi", {{"IV", 0.40}, {"ii", 0.30}, {"V", 0.20}, {"iii", 0.10}}},
  };
}

/// Edge p(a -> b) = P(function(a) -> function(b)) * share of b within its function.
inline ChordGraph chord_graph() {
  ChordGraph g;
  g.bands = valence_bands();
  for (const auto& v : kVertices) g.vertices.push_back({v.name, v.root, v.quality, v.function});
  const std::array<FunctionTable, 2> tables = {low_functions(), high_functions()};
  for (std::size_t band = 0; band < 2; ++band) {
    auto weight = [band](const VertexSpec& v) { return band == 0 ? v.weight_low : v.weight_high; };
    std::vector<std::vector<Edge>> rows;
    for (const auto& from : kVertices) {
      std::vector<Edge> row;
      const auto& fn_row = tables[band].at(from.function);
      for (std::size_t to = 0; to < kVertices.size(); ++to) {
        auto it = fn_row.find(kVertices[to].function);
        if (it == fn_row.end()) continue;
        const double p = it->second * weight(kVertices[to]);
        if (p > 0.0) row.push_back({to, p});
      }
      rows.push_back(std::move(row));
    }
    g.edges.push_back(std::move(rows));
    std::vector<Edge> start;
    for (std::size_t v = 0; v < kVertices.size(); ++v) start.push_back({v, weight(kVertices[v]) / 6.0});
    g.start.push_back(std::move(start));
  }
  return g;
}

inline SectionTemplate form() {
  return {{"I", "vi", "IV", "V", "I", "vi", "ii", "V"}, {"IV", "V", "iii", "vi", "ii", "V", "I", "I"}};
}

// Two diatonic octaves, C4..C6.
inline std::vector<int> melody_alphabet() { return {60, 62, 64, 65, 67, 69, 71, 72, 74, 76, 77, 79, 81, 83, 84}; }

/// Step-size preference times a per-degree pull; the low matrix drifts down towards
/// the A-minor triad, the high matrix climbs towards the C-major pentatonic.
inline TransitionMatrix melody_matrix(bool high) {
  const auto alphabet = melody_alphabet();
  const std::array<double, 7> degree_low = {0.9, 1.0, 1.4, 0.8, 0.8, 1.5, 0.9};
  const std::array<double, 7> degree_high = {1.5, 1.0, 1.4, 0.6, 1.4, 1.0, 0.5};
  auto step_weight = [](int d) {
    switch (std::abs(d)) {
      case 0: return 0.5;
      case 1: return 3.0;
      case 2: return 2.0;
      case 3: return 1.0;
      case 4: return 1.2;
      case 5: return 0.3;
      case 6: return 0.1;
      case 7: return 0.5;
      default: return 0.0;
    }
  };
  TransitionMatrix m;
  const int n = static_cast<int>(alphabet.size());
  for (int i = 0; i < n; ++i) {
    std::vector<double> row(static_cast<std::size_t>(n), 0.0);
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      const int d = j - i;
      const double direction = high ? (d > 0 ? 1.3 : 1.0) : (d < 0 ? 1.3 : 1.0);
      const double degree = (high ? degree_high : degree_low)[static_cast<std::size_t>(j % 7)];
      row[static_cast<std::size_t>(j)] = step_weight(d) * direction * degree;
      sum += row[static_cast<std::size_t>(j)];
    }
    for (auto& p : row) p /= sum;
    m.rows.push_back(std::move(row));
  }
  return m;
}

inline MelodyModel melody() {
  return {melody_alphabet(), valence_bands(), {melody_matrix(false), melody_matrix(true)}};
}

/// Notes given as {beat, beats, pitch}; downbeats carry the accent.
inline Motif motif(std::string name, std::initializer_list<std::array<double, 3>> notes) {
  Motif m{std::move(name), {}};
  for (const auto& n : notes) {
    const Tick onset = static_cast<Tick>(std::lround(n[0] * kTicksPerBeat));
    m.notes.push_back({onset, static_cast<Tick>(std::lround(n[1] * kTicksPerBeat)), static_cast<int>(n[2]),
                       onset % kTicksPerBar == 0});
  }
  return m;
}

inline MotifBank motifs() {
  MotifBank bank;
  bank.regions = motif_regions();
  bank.motifs = {
      {
          motif("low-sigh", {{0, 2, 76}, {2, 2, 74}, {4, 4, 72}, {8, 2, 69}, {10, 2, 67}, {12, 4, 72}}),
          motif("low-rise", {{0, 4, 67}, {4, 2, 69}, {6, 2, 72}, {8, 4, 74}, {12, 2, 72}, {14, 2, 67}}),
          motif("low-hover", {{0, 3, 72}, {3, 1, 69}, {4, 4, 67}, {8, 2, 64}, {10, 2, 67}, {12, 4, 69}}),
      },
      {
          motif("mid-climb", {{0, 1, 72}, {1, 1, 74}, {2, 2, 76}, {4, 1, 79}, {5, 1, 76}, {6, 2, 74},
                              {8, 1, 72}, {9, 1, 69}, {10, 2, 67}, {12, 1, 69}, {13, 1, 72}, {14, 2, 74}}),
          motif("mid-arpeggio", {{0, 1, 67}, {1, 1, 72}, {2, 1, 76}, {3, 1, 72}, {4, 2, 69}, {6, 2, 72},
                                 {8, 1, 74}, {9, 1, 77}, {10, 2, 74}, {12, 3, 71}, {15, 1, 67}}),
          motif("mid-answer", {{0, 2, 76}, {2, 1, 74}, {3, 1, 72}, {4, 2, 69}, {6, 1, 72}, {7, 1, 74},
                               {8, 2, 76}, {10, 2, 79}, {12, 4, 72}}),
      },
      {
          motif("high-run", {{0, .5, 72}, {.5, .5, 74}, {1, .5, 76}, {1.5, .5, 79}, {2, 1, 81}, {3, 1, 79},
                             {4, .5, 76}, {4.5, .5, 79}, {5, .5, 81}, {5.5, .5, 79}, {6, 2, 76},
                             {8, .5, 74}, {8.5, .5, 76}, {9, .5, 77}, {9.5, .5, 81}, {10, 1, 79}, {11, 1, 77},
                             {12, .5, 79}, {12.5, .5, 77}, {13, .5, 76}, {13.5, .5, 74}, {14, 2, 74}}),
          motif("high-leap", {{0, 1, 79}, {1, .5, 76}, {1.5, .5, 79}, {2, 1, 84}, {3, 1, 81},
                              {4, .5, 79}, {4.5, .5, 76}, {5, 1, 72}, {6, 1, 76}, {7, 1, 79},
                              {8, 1, 81}, {9, .5, 77}, {9.5, .5, 74}, {10, 2, 77},
                              {12, .5, 74}, {12.5, .5, 77}, {13, 1, 79}, {14, 1, 74}, {15, 1, 71}}),
          motif("high-broken", {{0, .5, 67}, {.5, .5, 72}, {1, .5, 76}, {1.5, .5, 72}, {2, .5, 67}, {2.5, .5, 72}, {3, 1, 76},
                                {4, .5, 69}, {4.5, .5, 72}, {5, .5, 76}, {5.5, .5, 72}, {6, 2, 69},
                                {8, .5, 74}, {8.5, .5, 77}, {9, .5, 81}, {9.5, .5, 77}, {10, 2, 74},
                                {12, .5, 71}, {12.5, .5, 74}, {13, .5, 79}, {13.5, .5, 74}, {14, 2, 79}}),
      },
  };
  return bank;
}

struct Hit {
  double beat;
  double beats;
  bool accent = false;
  std::optional<DrumVoice> voice = std::nullopt;
};

/// Repeats `cell` for `bars` bars, swapping in `last` for the final bar when given.
inline RhythmPattern pattern(std::string name, int bars, const std::vector<Hit>& cell,
                             const std::vector<Hit>& last = {}) {
  RhythmPattern p{std::move(name), bars, {}};
  for (int b = 0; b < bars; ++b) {
    const auto& hits = (b == bars - 1 && !last.empty()) ? last : cell;
    for (const auto& h : hits) {
      p.onsets.push_back({b * kTicksPerBar + static_cast<Tick>(std::lround(h.beat * kTicksPerBeat)),
                          static_cast<Tick>(std::lround(h.beats * kTicksPerBeat)), h.accent, h.voice});
    }
  }
  std::stable_sort(p.onsets.begin(), p.onsets.end(), [](const PatternOnset& a, const PatternOnset& b) {
    if (a.offset != b.offset) return a.offset < b.offset;
    return a.voice && b.voice && *a.voice < *b.voice;
  });
  return p;
}

inline PatternBank bass_bank() {
  PatternBank b{"bass", RegionSpec::from_cuts({"all"}, {}, {}), {}};
  const double third = 1.0 / 3.0;
  b.patterns = {{
      {pattern("bass-halves", 8, {{0, 2, true}, {2, 2}}), third},
      {pattern("bass-push", 8, {{0, 1.5, true}, {1.5, 0.5}, {2, 1}, {3, 1}}), third},
      {pattern("bass-walk", 8, {{0, 1, true}, {1, 1}, {2, 1}, {3, 1}},
               {{0, 1, true}, {1, 1}, {2, .5}, {2.5, .5}, {3, .5}, {3.5, .5}}),
       third},
  }};
  return b;
}

inline PatternBank strummed_bank() {
  PatternBank b{"strummed", strummed_regions(), {}};
  b.patterns = {
      {
          {pattern("strum-whole", 1, {{0, 4, true}}), 0.5},
          {pattern("strum-halves", 1, {{0, 2, true}, {2, 2}}), 0.3},
          {pattern("strum-dotted", 1, {{0, 3, true}, {3, 1}}), 0.2},
      },
      {
          {pattern("strum-quarters", 1, {{0, 1, true}, {1, 1}, {2, 1}, {3, 1}}), 0.5},
          {pattern("strum-skip", 1, {{0, 1, true}, {1.5, .5}, {2, 1}, {3, 1}}), 0.3},
          {pattern("strum-half-quarters", 1, {{0, 2, true}, {2, 1}, {3, 1}}), 0.2},
      },
      {
          {pattern("strum-eighths", 1,
                   {{0, .5, true}, {.5, .5}, {1, .5}, {1.5, .5}, {2, .5, true}, {2.5, .5}, {3, .5}, {3.5, .5}}),
           0.5},
          {pattern("strum-drive", 1, {{0, .5, true}, {.5, .5}, {1, 1}, {2, .5, true}, {2.5, .5}, {3, 1}}), 0.3},
          {pattern("strum-syncopated", 1, {{0, 1, true}, {1, .5}, {1.5, .5}, {2, 1, true}, {3, .5}, {3.5, .5}}), 0.2},
      },
  };
  return b;
}

inline PatternBank percussion_bank() {
  constexpr auto K = DrumVoice::kick;
  constexpr auto S = DrumVoice::snare;
  constexpr auto H = DrumVoice::hat;
  constexpr auto R = DrumVoice::rim;
  auto eighth_hats = [H] {
    std::vector<Hit> v;
    for (int i = 0; i < 8; ++i) v.push_back({i * 0.5, 0.25, false, H});
    return v;
  };
  auto with = [](std::vector<Hit> base, std::initializer_list<Hit> extra) {
    base.insert(base.end(), extra);
    return base;
  };
  const double third = 1.0 / 3.0;
  PatternBank b{"percussion", percussion_regions(), {}};
  b.patterns = {
      {{pattern("perc-rim", 8, {{0, .5, true, K}, {1, .25, false, R}, {3, .25, false, R}},
                {{0, .5, true, K}, {1, .25, false, R}, {2.5, .25, false, R}, {3, .25, false, R}}),
        1.0}},
      {{pattern("perc-backbeat", 8,
                {{0, .5, true, K}, {0, .25, false, H}, {1, .5, false, S}, {1, .25, false, H}, {2, .5, false, K},
                 {2, .25, false, H}, {3, .5, false, S}, {3, .25, false, H}}),
        1.0}},
      {
          {pattern("perc-drive", 8, with(eighth_hats(), {{0, .5, true, K}, {1, .5, false, S}, {2, .5, false, K}, {3, .5, false, S}})),
           third},
          {pattern("perc-push", 8,
                   with(eighth_hats(), {{0, .5, true, K}, {1, .5, false, S}, {1.5, .5, false, K}, {2, .5, false, K}, {3, .5, false, S}})),
           third},
          {pattern("perc-fill", 8, with(eighth_hats(), {{0, .5, true, K}, {1, .5, false, S}, {2, .5, false, K}, {2.5, .5, false, K}, {3, .5, false, S}}),
                   with(eighth_hats(), {{0, .5, true, K}, {1, .5, false, S}, {2, .5, false, K}, {2.5, .25, false, S},
                                        {3, .25, false, S}, {3.5, .25, false, S}})),
           third},
      },
  };
  return b;
}

}  // namespace defaults

/// The shipped configuration: C major, tables above, laws at their documented defaults.
inline EngineConfig default_config() {
  EngineConfig c;
  c.graph = defaults::chord_graph();
  c.form = defaults::form();
  c.melody = defaults::melody();
  c.motifs = defaults::motifs();
  c.bass = defaults::bass_bank();
  c.strummed = defaults::strummed_bank();
  c.percussion = defaults::percussion_bank();
  return c;
}

}  // namespace affpop
