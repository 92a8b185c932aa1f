/**
 * @file rhythm.hpp
 * @brief Rhythm patterns, arousal-indexed pattern banks and roughness-driven onset density.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "affpop/emotion.hpp"
#include "affpop/error.hpp"
#include "affpop/rng.hpp"

namespace affpop {

using Tick = std::int64_t;

// Fixed 4/4 meter on an eighth-note grid.
inline constexpr Tick kTicksPerBeat = 480;
inline constexpr int kBeatsPerBar = 4;
inline constexpr Tick kTicksPerBar = kTicksPerBeat * kBeatsPerBar;
inline constexpr int kSlotsPerBar = 8;
inline constexpr Tick kTicksPerSlot = kTicksPerBar / kSlotsPerBar;

enum class DrumVoice { kick, snare, hat, rim };

inline constexpr std::array<std::string_view, 4> kDrumVoiceNames = {"kick", "snare", "hat", "rim"};

inline std::string_view to_string(DrumVoice v) { return kDrumVoiceNames[static_cast<std::size_t>(v)]; }

inline DrumVoice drum_voice_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kDrumVoiceNames.size(); ++i)
    if (kDrumVoiceNames[i] == s) return static_cast<DrumVoice>(i);
  throw ConfigError("unknown drum voice '" + std::string(s) + "'");
}

/// General MIDI percussion key for each voice.
inline int drum_note(DrumVoice v) {
  switch (v) {
    case DrumVoice::kick: return 36;
    case DrumVoice::snare: return 38;
    case DrumVoice::hat: return 42;
    case DrumVoice::rim: return 37;
  }
  return 36;
}

struct PatternOnset {
  Tick offset = 0;  // from pattern start
  Tick duration = kTicksPerBeat;
  bool accent = false;
  std::optional<DrumVoice> voice;

  friend bool operator==(const PatternOnset&, const PatternOnset&) = default;
};

struct RhythmPattern {
  std::string name;
  int length_bars = 1;
  std::vector<PatternOnset> onsets;

  Tick length_ticks() const { return kTicksPerBar * length_bars; }

  /// Onsets falling in bar `bar` of the pattern (wrapping), relative to that bar's start.
  std::vector<PatternOnset> bar(std::int64_t bar) const {
    const Tick begin = kTicksPerBar * (bar % length_bars);
    std::vector<PatternOnset> out;
    for (const auto& o : onsets) {
      if (o.offset >= begin && o.offset < begin + kTicksPerBar) {
        auto rel = o;
        rel.offset -= begin;
        out.push_back(rel);
      }
    }
    return out;
  }

  double mean_onsets_per_bar() const { return static_cast<double>(onsets.size()) / length_bars; }

  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    const std::string where = "pattern '" + name + "'";
    if (length_bars < 1) out.push_back(where + ": length must be at least one bar");
    for (std::size_t i = 0; i < onsets.size(); ++i) {
      const auto& o = onsets[i];
      if (o.offset < 0 || o.offset >= length_ticks()) out.push_back(where + ": onset outside pattern");
      if (o.duration <= 0) out.push_back(where + ": non-positive duration");
      if (i > 0) {
        const auto& p = onsets[i - 1];
        const bool sorted = p.offset < o.offset || (p.offset == o.offset && p.voice && o.voice && *p.voice < *o.voice);
        if (!sorted) out.push_back(where + ": onsets not sorted");
      }
    }
    return out;
  }

  friend bool operator==(const RhythmPattern&, const RhythmPattern&) = default;
};

struct WeightedPattern {
  RhythmPattern pattern;
  double probability = 1.0;
  friend bool operator==(const WeightedPattern&, const WeightedPattern&) = default;
};

/// Which pattern of which region was chosen.
struct PatternRef {
  std::size_t region = 0;
  std::size_t index = 0;
  friend bool operator==(const PatternRef&, const PatternRef&) = default;
};

struct PatternBank {
  std::string instrument;
  RegionSpec regions;
  std::vector<std::vector<WeightedPattern>> patterns;  // per region

  const RhythmPattern& at(PatternRef r) const { return patterns.at(r.region).at(r.index).pattern; }

  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    for (auto& v : regions.violations()) out.push_back(instrument + " bank: " + v);
    if (patterns.size() != regions.size()) {
      out.push_back(instrument + " bank: " + std::to_string(patterns.size()) + " pattern sets for " +
                    std::to_string(regions.size()) + " regions");
      return out;
    }
    for (std::size_t r = 0; r < patterns.size(); ++r) {
      const std::string where = instrument + " bank, region '" + regions.label(r) + "'";
      if (patterns[r].empty()) out.push_back(where + ": no patterns");
      double sum = 0.0;
      for (const auto& wp : patterns[r]) {
        if (!(wp.probability > 0.0)) out.push_back(where + ": non-positive pattern probability");
        sum += wp.probability;
        for (auto& v : wp.pattern.violations()) out.push_back(where + ": " + v);
      }
      if (!patterns[r].empty() && std::abs(sum - 1.0) > 1e-9)
        out.push_back(where + ": probabilities sum to " + std::to_string(sum));
    }
    return out;
  }

  friend bool operator==(const PatternBank&, const PatternBank&) = default;
};

/// Region from arousal, then a pattern sampled from that region's distribution.
template <std::uniform_random_bit_generator Rng>
PatternRef select_pattern(const PatternBank& bank, double arousal, Rng& rng) {
  const std::size_t region = bank.regions.classify(arousal);
  const auto& set = bank.patterns.at(region);
  std::vector<double> w;
  w.reserve(set.size());
  for (const auto& p : set) w.push_back(p.probability);
  return {region, weighted_index(rng, w)};
}

/// Onsets per bar for a roughness value: round(8 (1 - r)) kept within [1, 8].
inline int density_from_roughness(double roughness) {
  const long n = std::lround(kSlotsPerBar * (1.0 - roughness));
  return static_cast<int>(std::clamp<long>(n, 1, kSlotsPerBar));
}

/// `count` eighth-note slots: the downbeat always, the rest drawn uniformly from the free slots.
template <std::uniform_random_bit_generator Rng>
std::vector<int> place_onsets(int count, Rng& rng) {
  count = std::clamp(count, 1, kSlotsPerBar);
  std::vector<int> free;
  for (int s = 1; s < kSlotsPerBar; ++s) free.push_back(s);
  std::vector<int> slots{0};
  for (int i = 1; i < count; ++i) {
    const std::size_t k = uniform_index(rng, free.size());
    slots.push_back(free[k]);
    free.erase(free.begin() + static_cast<std::ptrdiff_t>(k));
  }
  std::sort(slots.begin(), slots.end());
  return slots;
}

inline std::string format_density(const RhythmPattern& p) {
  std::string s = std::to_string(p.mean_onsets_per_bar());
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

/// Density must not increase as arousal falls: every pattern of a region is no denser
/// than any pattern of the region above it.
inline std::vector<std::string> percussion_density_ordering(const PatternBank& bank) {
  std::vector<std::string> out;
  for (std::size_t r = 0; r + 1 < bank.patterns.size(); ++r) {
    for (const auto& lower : bank.patterns[r]) {
      for (const auto& upper : bank.patterns[r + 1]) {
        if (lower.pattern.mean_onsets_per_bar() > upper.pattern.mean_onsets_per_bar()) {
          out.push_back("pattern '" + lower.pattern.name + "' (" + format_density(lower.pattern) +
                        " onsets/bar) is denser than '" + upper.pattern.name + "' (" + format_density(upper.pattern) +
                        " onsets/bar) in a higher arousal region");
        }
      }
    }
  }
  return out;
}

}  // namespace affpop
