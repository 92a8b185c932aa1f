/**
 * @file harmony.hpp
 * @brief Chord vocabulary, valence-conditioned chord graph and the AABB bar template.
 */
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "affpop/emotion.hpp"
#include "affpop/error.hpp"
#include "affpop/rng.hpp"

namespace affpop {

enum class Quality { major, minor, dominant7, minor7, major7, diminished };

inline constexpr std::array<std::string_view, 6> kQualityNames = {
    "major", "minor", "dominant7", "minor7", "major7", "diminished"};

inline std::string_view to_string(Quality q) { return kQualityNames[static_cast<std::size_t>(q)]; }

inline Quality quality_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kQualityNames.size(); ++i)
    if (kQualityNames[i] == s) return static_cast<Quality>(i);
  throw ConfigError("unknown chord quality '" + std::string(s) + "'");
}

inline int pitch_class(int note) noexcept { return ((note % 12) + 12) % 12; }

struct Chord {
  std::string name;      // display name, unique within a graph
  int root = 0;          // pitch class
  Quality quality = Quality::major;
  std::string function;  // scale-degree role: I, ii, IV, V, vi, ...

  friend bool operator==(const Chord&, const Chord&) = default;
};

/// Root, third, fifth, and seventh when present, as pitch classes.
inline std::vector<int> chord_tones(const Chord& chord) {
  static constexpr std::array<std::array<int, 4>, 6> kIntervals = {{
      {0, 4, 7, -1},
      {0, 3, 7, -1},
      {0, 4, 7, 10},
      {0, 3, 7, 10},
      {0, 4, 7, 11},
      {0, 3, 6, -1},
  }};
  std::vector<int> tones;
  for (int iv : kIntervals[static_cast<std::size_t>(chord.quality)]) {
    if (iv < 0) break;
    tones.push_back(pitch_class(chord.root + iv));
  }
  return tones;
}

struct Edge {
  std::size_t to = 0;
  double probability = 0.0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Directed probabilistic chord graph with one edge table per valence band.
struct ChordGraph {
  std::vector<Chord> vertices;
  RegionSpec bands;
  /// edges[band][from] lists the outgoing transitions of `from` under that band.
  std::vector<std::vector<std::vector<Edge>>> edges;
  /// start[band] is the distribution of the first chord of a progression.
  std::vector<std::vector<Edge>> start;

  std::size_t band_of(double valence) const { return bands.classify(valence); }

  std::optional<std::size_t> find(const Chord& c) const {
    for (std::size_t i = 0; i < vertices.size(); ++i)
      if (vertices[i] == c) return i;
    return std::nullopt;
  }
  std::optional<std::size_t> find(std::string_view name) const {
    for (std::size_t i = 0; i < vertices.size(); ++i)
      if (vertices[i].name == name) return i;
    return std::nullopt;
  }
  std::size_t index_of(const Chord& c) const {
    if (auto i = find(c)) return *i;
    throw std::logic_error("chord '" + c.name + "' is not a vertex of the graph");
  }

  friend bool operator==(const ChordGraph&, const ChordGraph&) = default;
};

namespace detail {

inline std::string fmt_number(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

inline std::vector<std::string> check_distribution(const std::vector<Edge>& row, std::size_t n_vertices,
                                                   const std::string& where) {
  std::vector<std::string> out;
  double sum = 0.0;
  for (const auto& e : row) {
    if (e.to >= n_vertices) out.push_back(where + ": edge to unknown vertex " + std::to_string(e.to));
    if (!(e.probability >= 0.0) || e.probability > 1.0)
      out.push_back(where + ": probability " + fmt_number(e.probability) + " outside [0, 1]");
    sum += e.probability;
  }
  if (!row.empty() && std::abs(sum - 1.0) > 1e-9) out.push_back(where + ": row sums to " + fmt_number(sum));
  return out;
}

}  // namespace detail

/// Every violation of the graph invariants: stochastic rows and strong connectivity per band.
inline std::vector<std::string> validate_graph(const ChordGraph& g) {
  std::vector<std::string> out;
  const std::size_t n = g.vertices.size();
  if (n == 0) out.emplace_back("graph has no vertices");
  for (auto& v : g.bands.violations()) out.push_back("valence bands: " + v);
  if (g.edges.size() != g.bands.size())
    out.push_back("graph has " + std::to_string(g.edges.size()) + " edge tables for " +
                  std::to_string(g.bands.size()) + " valence bands");
  if (!g.start.empty() && g.start.size() != g.bands.size())
    out.push_back("graph has " + std::to_string(g.start.size()) + " start rows for " +
                  std::to_string(g.bands.size()) + " valence bands");
  for (std::size_t i = 0; i < n; ++i) {
    if (chord_tones(g.vertices[i]).empty()) out.push_back("chord '" + g.vertices[i].name + "' has no tones");
    for (std::size_t j = i + 1; j < n; ++j)
      if (g.vertices[i].name == g.vertices[j].name) out.push_back("duplicate chord name '" + g.vertices[i].name + "'");
  }

  for (std::size_t b = 0; b < g.edges.size(); ++b) {
    const std::string band = b < g.bands.size() ? g.bands.label(b) : std::to_string(b);
    const auto& table = g.edges[b];
    if (table.size() != n) {
      out.push_back("band '" + band + "': edge table has " + std::to_string(table.size()) + " rows for " +
                    std::to_string(n) + " vertices");
      continue;
    }
    for (std::size_t from = 0; from < n; ++from) {
      const std::string where = "band '" + band + "', chord '" + g.vertices[from].name + "'";
      if (table[from].empty()) out.push_back(where + ": dead end (no outgoing edges)");
      auto row = detail::check_distribution(table[from], n, where);
      out.insert(out.end(), row.begin(), row.end());
    }
    // Strong connectivity: every vertex reaches every other through positive edges.
    for (std::size_t src = 0; src < n; ++src) {
      std::vector<bool> seen(n, false);
      std::vector<std::size_t> frontier{src};
      seen[src] = true;
      while (!frontier.empty()) {
        const std::size_t v = frontier.back();
        frontier.pop_back();
        for (const auto& e : table[v]) {
          if (e.to < n && e.probability > 0.0 && !seen[e.to]) {
            seen[e.to] = true;
            frontier.push_back(e.to);
          }
        }
      }
      for (std::size_t dst = 0; dst < n; ++dst)
        if (!seen[dst])
          out.push_back("band '" + band + "': '" + g.vertices[dst].name + "' unreachable from '" +
                        g.vertices[src].name + "'");
    }
  }
  for (std::size_t b = 0; b < g.start.size(); ++b) {
    const std::string where = "start row of band " + std::to_string(b);
    if (g.start[b].empty()) out.push_back(where + " is empty");
    auto row = detail::check_distribution(g.start[b], n, where);
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

/// Fixed chord-function labels for a 32-bar AABB form.
struct SectionTemplate {
  std::vector<std::string> section_a;
  std::vector<std::string> section_b;

  static constexpr std::size_t kSectionBars = 8;
  static constexpr std::size_t kFormBars = 32;

  /// Function label of the (0-based) bar; the form loops every 32 bars.
  const std::string& function_at(std::int64_t bar) const {
    const auto slot = static_cast<std::size_t>(bar % static_cast<std::int64_t>(kFormBars));
    const auto& section = slot < 2 * kSectionBars ? section_a : section_b;
    return section.at(slot % kSectionBars);
  }

  std::vector<std::string> form() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < kFormBars; ++i) out.push_back(function_at(static_cast<std::int64_t>(i)));
    return out;
  }

  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    if (section_a.size() != kSectionBars) out.emplace_back("section A must have 8 bars");
    if (section_b.size() != kSectionBars) out.emplace_back("section B must have 8 bars");
    return out;
  }

  friend bool operator==(const SectionTemplate&, const SectionTemplate&) = default;
};

/// Transitions out of `from` (or the start row when `from` is empty) whose target
/// carries `function`. Probabilities are left unnormalized.
inline std::vector<Edge> candidates(const ChordGraph& g, std::optional<std::size_t> from, std::size_t band,
                                    std::optional<std::string_view> function = std::nullopt) {
  const auto& row = from ? g.edges.at(band).at(*from) : g.start.at(band);
  std::vector<Edge> out;
  for (const auto& e : row)
    if (e.probability > 0.0 && (!function || g.vertices.at(e.to).function == *function)) out.push_back(e);
  return out;
}

/// Every template transition (including the 32 -> 1 wrap) must have a candidate in every band.
inline std::vector<std::string> validate_template(const ChordGraph& g, const SectionTemplate& t) {
  std::vector<std::string> out = t.violations();
  if (!out.empty()) return out;
  const auto form = t.form();
  for (std::size_t b = 0; b < g.bands.size() && b < g.edges.size(); ++b) {
    if (b < g.start.size() && candidates(g, std::nullopt, b, form.front()).empty())
      out.push_back("band '" + g.bands.label(b) + "': no start chord with function " + form.front());
    for (std::size_t i = 0; i < form.size(); ++i) {
      const auto& next = form[(i + 1) % form.size()];
      for (std::size_t v = 0; v < g.vertices.size(); ++v) {
        if (g.vertices[v].function != form[i] || v >= g.edges[b].size()) continue;
        if (candidates(g, v, b, next).empty())
          out.push_back("band '" + g.bands.label(b) + "': '" + g.vertices[v].name + "' has no edge to a " + next +
                        " chord (bar " + std::to_string(i + 1) + " -> " + std::to_string((i + 1) % form.size() + 1) +
                        ")");
      }
    }
  }
  return out;
}

/// Samples the successor of `current` under the band of `valence`. When `function` is
/// set, only targets with that label are eligible and their weights renormalize.
template <std::uniform_random_bit_generator Rng>
std::size_t next_chord(const ChordGraph& g, std::size_t current, double valence, Rng& rng,
                       std::optional<std::string_view> function = std::nullopt) {
  if (current >= g.vertices.size()) throw std::logic_error("next_chord: current chord is not a vertex");
  const auto eligible = candidates(g, current, g.band_of(valence), function);
  if (eligible.empty())
    throw std::logic_error("next_chord: no edge from '" + g.vertices[current].name + "' to a " +
                           std::string(function.value_or("?")) + " chord");
  std::vector<double> w;
  w.reserve(eligible.size());
  for (const auto& e : eligible) w.push_back(e.probability);
  return eligible[weighted_index(rng, w)].to;
}

template <std::uniform_random_bit_generator Rng>
Chord next_chord(const ChordGraph& g, const Chord& current, double valence, Rng& rng) {
  return g.vertices[next_chord(g, g.index_of(current), valence, rng)];
}

/// First chord of a progression, drawn from the start row of the valence band.
template <std::uniform_random_bit_generator Rng>
std::size_t first_chord(const ChordGraph& g, double valence, Rng& rng,
                        std::optional<std::string_view> function = std::nullopt) {
  const auto eligible = candidates(g, std::nullopt, g.band_of(valence), function);
  if (eligible.empty()) throw std::logic_error("first_chord: no start chord for the requested function");
  std::vector<double> w;
  for (const auto& e : eligible) w.push_back(e.probability);
  return eligible[weighted_index(rng, w)].to;
}

inline bool is_supported_length(std::size_t bars) { return bars == 4 || bars == 8 || bars == 16 || bars == 32; }

/// One chord per bar; bar i is sampled under valences[i] and constrained to the template slot.
template <std::uniform_random_bit_generator Rng>
std::vector<Chord> progression_for(const SectionTemplate& tmpl, std::size_t bars, const std::vector<double>& valences,
                                   const ChordGraph& g, Rng& rng) {
  if (!is_supported_length(bars)) throw InputError("progression length must be 4, 8, 16 or 32 bars");
  if (valences.size() != bars)
    throw InputError("expected " + std::to_string(bars) + " valence values, got " + std::to_string(valences.size()));
  std::vector<Chord> out;
  std::optional<std::size_t> prev;
  for (std::size_t i = 0; i < bars; ++i) {
    const auto& fn = tmpl.function_at(static_cast<std::int64_t>(i));
    const std::size_t c = prev ? next_chord(g, *prev, valences[i], rng, fn) : first_chord(g, valences[i], rng, fn);
    out.push_back(g.vertices[c]);
    prev = c;
  }
  return out;
}

}  // namespace affpop
