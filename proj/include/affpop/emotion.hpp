/**
 * @file emotion.hpp
 * @brief Valence/arousal input model and the scalar laws mapping it to musical parameters.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "affpop/error.hpp"

namespace affpop {

inline double clamp_unit(double x) noexcept {
  if (std::isnan(x)) return 0.0;
  return std::clamp(x, 0.0, 1.0);
}

/// A point in the valence-arousal unit square. Both coordinates clamp at construction.
class EmotionPoint {
 public:
  constexpr EmotionPoint() = default;
  EmotionPoint(double valence, double arousal) noexcept
      : valence_(clamp_unit(valence)), arousal_(clamp_unit(arousal)) {}

  double valence() const noexcept { return valence_; }
  double arousal() const noexcept { return arousal_; }

  friend bool operator==(const EmotionPoint&, const EmotionPoint&) = default;

 private:
  double valence_ = 0.5;
  double arousal_ = 0.5;
};

/// Per-bar emotion keyframes. Held constant between entries.
class EmotionTrajectory {
 public:
  struct Entry {
    std::int64_t bar;
    EmotionPoint point;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  EmotionTrajectory() = default;
  explicit EmotionTrajectory(std::vector<Entry> entries) : entries_(std::move(entries)) {
    if (entries_.empty() || entries_.front().bar != 0)
      throw InputError("trajectory must start at bar 0");
    for (std::size_t i = 1; i < entries_.size(); ++i)
      if (entries_[i].bar <= entries_[i - 1].bar)
        throw InputError("trajectory bar indices must be strictly increasing");
  }

  static EmotionTrajectory constant(EmotionPoint p) { return EmotionTrajectory({{0, p}}); }

  /// Values from one point per bar, as used by a per-bar valence array.
  static EmotionTrajectory per_bar(const std::vector<EmotionPoint>& points) {
    std::vector<Entry> e;
    for (std::size_t i = 0; i < points.size(); ++i) e.push_back({static_cast<std::int64_t>(i), points[i]});
    return EmotionTrajectory(std::move(e));
  }

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }
  std::int64_t last_bar() const noexcept { return entries_.empty() ? 0 : entries_.back().bar; }

  /// The keyframe exactly at `bar`, if one exists.
  std::optional<EmotionPoint> keyframe(std::int64_t bar) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), bar,
                               [](const Entry& e, std::int64_t b) { return e.bar < b; });
    if (it != entries_.end() && it->bar == bar) return it->point;
    return std::nullopt;
  }

  /// Point in effect at `bar` (last keyframe at or before it).
  EmotionPoint at(std::int64_t bar) const {
    EmotionPoint p;
    for (const auto& e : entries_) {
      if (e.bar > bar) break;
      p = e.point;
    }
    return p;
  }

  friend bool operator==(const EmotionTrajectory&, const EmotionTrajectory&) = default;

 private:
  std::vector<Entry> entries_;
};

/// One labelled interval of [0, 1].
struct Region {
  std::string label;
  double lower = 0.0;
  double upper = 1.0;
  bool lower_inclusive = true;
  bool upper_inclusive = false;

  bool contains(double v) const noexcept {
    const bool above = lower_inclusive ? v >= lower : v > lower;
    const bool below = upper_inclusive ? v <= upper : v < upper;
    return above && below;
  }
  friend bool operator==(const Region&, const Region&) = default;
};

/// Ordered partition of [0, 1] into labelled regions.
class RegionSpec {
 public:
  RegionSpec() = default;
  explicit RegionSpec(std::vector<Region> regions) : regions_(std::move(regions)) {}

  /// Builds a partition from cut points. `cut_in_upper[i]` puts cut i in the region above it.
  static RegionSpec from_cuts(std::vector<std::string> labels, std::vector<double> cuts,
                              std::vector<bool> cut_in_upper) {
    if (labels.size() != cuts.size() + 1 || cut_in_upper.size() != cuts.size())
      throw InputError("RegionSpec::from_cuts: size mismatch");
    std::vector<Region> r;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      Region reg;
      reg.label = labels[i];
      reg.lower = i == 0 ? 0.0 : cuts[i - 1];
      reg.upper = i == cuts.size() ? 1.0 : cuts[i];
      reg.lower_inclusive = i == 0 ? true : static_cast<bool>(cut_in_upper[i - 1]);
      reg.upper_inclusive = i == cuts.size() ? true : !cut_in_upper[i];
      r.push_back(std::move(reg));
    }
    return RegionSpec(std::move(r));
  }

  const std::vector<Region>& regions() const noexcept { return regions_; }
  std::size_t size() const noexcept { return regions_.size(); }
  const std::string& label(std::size_t i) const { return regions_.at(i).label; }

  std::optional<std::size_t> index_of(const std::string& label) const {
    for (std::size_t i = 0; i < regions_.size(); ++i)
      if (regions_[i].label == label) return i;
    return std::nullopt;
  }

  /// Every gap, overlap or bad endpoint. Empty means the spec partitions [0, 1].
  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    if (regions_.empty()) {
      out.emplace_back("region spec is empty");
      return out;
    }
    const auto& first = regions_.front();
    const auto& last = regions_.back();
    if (first.lower != 0.0 || !first.lower_inclusive) out.push_back("region '" + first.label + "' does not start at [0");
    if (last.upper != 1.0 || !last.upper_inclusive) out.push_back("region '" + last.label + "' does not end at 1]");
    for (std::size_t i = 0; i < regions_.size(); ++i) {
      const auto& r = regions_[i];
      if (r.lower > r.upper || (r.lower == r.upper && !(r.lower_inclusive && r.upper_inclusive)))
        out.push_back("region '" + r.label + "' is empty");
      if (i + 1 == regions_.size()) break;
      const auto& n = regions_[i + 1];
      if (r.upper < n.lower) {
        out.push_back("gap between '" + r.label + "' and '" + n.label + "'");
      } else if (r.upper > n.lower) {
        out.push_back("overlap between '" + r.label + "' and '" + n.label + "'");
      } else if (r.upper_inclusive && n.lower_inclusive) {
        out.push_back("boundary " + std::to_string(r.upper) + " claimed by both '" + r.label + "' and '" + n.label + "'");
      } else if (!r.upper_inclusive && !n.lower_inclusive) {
        out.push_back("boundary " + std::to_string(r.upper) + " claimed by neither '" + r.label + "' nor '" + n.label + "'");
      }
    }
    return out;
  }

  /// Index of the unique region containing `value` (clamped to [0, 1]).
  std::size_t classify(double value) const {
    const double v = clamp_unit(value);
    for (std::size_t i = 0; i < regions_.size(); ++i)
      if (regions_[i].contains(v)) return i;
    throw ConfigError("region spec does not cover " + std::to_string(v));
  }

  friend bool operator==(const RegionSpec&, const RegionSpec&) = default;

 private:
  std::vector<Region> regions_;
};

/// Label of the region holding `value`. Malformed specs are a configuration error.
inline const std::string& classify_region(double value, const RegionSpec& spec) {
  if (auto v = spec.violations(); !v.empty()) throw ConfigError(std::move(v));
  return spec.label(spec.classify(value));
}

/// Constants behind the arousal laws. Defaults match the shipped configuration.
struct ParameterLaws {
  double tempo_min_bpm = 36.0;
  double tempo_max_bpm = 130.0;
  double velocity_base = 60.0;
  double velocity_span = 15.0;
  int accent_offset = 8;
  double roughness_floor = 0.2;

  friend bool operator==(const ParameterLaws&, const ParameterLaws&) = default;
};

/// MIDI attack velocity, 60 + 15a rounded half-up.
inline int velocity_for(double arousal, const ParameterLaws& laws = {}) {
  const double v = laws.velocity_base + clamp_unit(arousal) * laws.velocity_span;
  return std::clamp(static_cast<int>(std::floor(v + 0.5)), 1, 127);
}

/// Logarithmic tempo law: steepest at low arousal, exact at both range endpoints.
inline double tempo_for(double arousal, const ParameterLaws& laws = {}) {
  const double a = clamp_unit(arousal);
  return laws.tempo_min_bpm +
         (laws.tempo_max_bpm - laws.tempo_min_bpm) * std::log1p((std::numbers::e - 1.0) * a);
}

/// Rhythmic roughness falls linearly with arousal down to the configured floor.
inline double roughness_for(double arousal, const ParameterLaws& laws = {}) {
  return std::max(laws.roughness_floor, 1.0 - clamp_unit(arousal));
}

}  // namespace affpop
