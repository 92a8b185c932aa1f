#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "affpop/engine.hpp"
#include "affpop/error.hpp"
#include "affpop/midi.hpp"

namespace affpop {

/// 13 points: corners, quadrant middles, edge middles and the neutral point.
class StimulusGrid {
 public:
  static constexpr std::size_t kSize = 13;

  StimulusGrid() {
    std::size_t i = 0;
    for (double v : {0.0, 1.0})
      for (double a : {0.0, 1.0}) points_[i++] = {v, a};
    for (double v : {0.25, 0.75})
      for (double a : {0.25, 0.75}) points_[i++] = {v, a};
    points_[i++] = {0.5, 0.0};
    points_[i++] = {0.5, 1.0};
    points_[i++] = {0.0, 0.5};
    points_[i++] = {1.0, 0.5};
    points_[i++] = {0.5, 0.5};
  }

  const std::array<std::array<double, 2>, kSize>& points() const noexcept { return points_; }

  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    auto has = [&](double v, double a) {
      return std::any_of(points_.begin(), points_.end(), [&](const auto& p) { return p[0] == v && p[1] == a; });
    };
    for (const auto& [v, a] : points_) {
      if (v < 0 || v > 1 || a < 0 || a > 1) out.push_back("grid point off the unit square");
      if (!has(1 - v, a) || !has(v, 1 - a)) out.push_back("grid not symmetric at (" + std::to_string(v) + ", " +
                                                          std::to_string(a) + ")");
    }
    for (std::size_t i = 0; i < kSize; ++i)
      for (std::size_t j = i + 1; j < kSize; ++j)
        if (points_[i] == points_[j]) out.push_back("duplicate grid point");
    return out;
  }

 private:
  std::array<std::array<double, 2>, kSize> points_{};
};

inline constexpr double kTargetStimulusSeconds = 32.6;
inline constexpr int kSeedsPerPoint = 3;

inline double constant_excerpt_seconds(int bars, double arousal, const ParameterLaws& laws = {}) {
  return bars * kBeatsPerBar * usec_per_quarter(tempo_for(arousal, laws)) / 1e6;
}

/// 4 bars at low arousal; otherwise 8 or 16, whichever lands nearer the target duration.
inline int stimulus_bars(double arousal, const ParameterLaws& laws = {}) {
  if (arousal <= 0.25) return 4;
  const double d8 = std::abs(constant_excerpt_seconds(8, arousal, laws) - kTargetStimulusSeconds);
  const double d16 = std::abs(constant_excerpt_seconds(16, arousal, laws) - kTargetStimulusSeconds);
  return d16 < d8 ? 16 : 8;
}

struct StimulusEntry {
  std::string id;
  std::size_t point = 0;
  int replicate = 0;
  double valence = 0;
  double arousal = 0;
  std::uint64_t seed = 0;
  int bars = 0;
  double tempo_bpm = 0;
  double duration_s = 0;
  std::string file;
};

inline std::vector<StimulusEntry> plan_stimuli(std::uint64_t base_seed, const EngineConfig& cfg) {
  const StimulusGrid grid;
  if (auto v = grid.violations(); !v.empty()) throw ConfigError(v);
  std::vector<StimulusEntry> plan;
  for (std::size_t p = 0; p < StimulusGrid::kSize; ++p) {
    for (int r = 0; r < kSeedsPerPoint; ++r) {
      StimulusEntry e;
      e.point = p + 1;
      e.replicate = r + 1;
      e.valence = grid.points()[p][0];
      e.arousal = grid.points()[p][1];
      e.seed = base_seed + static_cast<std::uint64_t>(r);
      e.bars = stimulus_bars(e.arousal, cfg.laws);
      char id[32];
      std::snprintf(id, sizeof id, "p%02zu_r%d", e.point, e.replicate);
      e.id = id;
      e.file = e.id + ".mid";
      plan.push_back(std::move(e));
    }
  }
  return plan;
}

inline Excerpt render_stimulus(const EngineConfig& cfg, const StimulusEntry& e) {
  ExcerptSpec spec;
  spec.bars = e.bars;
  spec.seed = e.seed;
  spec.trajectory = EmotionTrajectory::constant(EmotionPoint(e.valence, e.arousal));
  return generate_excerpt(cfg, spec);
}

inline const char* kManifestHeader = "stimulus_id,point,replicate,valence,arousal,seed,bars,tempo_bpm,duration_s,file";

inline std::string manifest_csv(const std::vector<StimulusEntry>& entries) {
  std::ostringstream out;
  out << kManifestHeader << '\n';
  char buf[256];
  for (const auto& e : entries) {
    std::snprintf(buf, sizeof buf, "%s,%zu,%d,%.2f,%.2f,%llu,%d,%.4f,%.4f,%s\n", e.id.c_str(), e.point, e.replicate,
                  e.valence, e.arousal, static_cast<unsigned long long>(e.seed), e.bars, e.tempo_bpm, e.duration_s,
                  e.file.c_str());
    out << buf;
  }
  return out.str();
}

/// Renders the 39 stimuli into `dir` and writes manifest.csv. `jobs` = 0 picks the hardware concurrency.
inline std::vector<StimulusEntry> write_stimulus_batch(const std::filesystem::path& dir, std::uint64_t base_seed,
                                                       const EngineConfig& cfg, unsigned jobs = 0) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());

  auto plan = plan_stimuli(base_seed, cfg);
  std::vector<std::vector<std::uint8_t>> files(plan.size());
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(plan.size()));

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs);
  auto work = [&](unsigned w) {
    try {
      for (std::size_t i; (i = next.fetch_add(1)) < plan.size();) {
        auto ex = render_stimulus(cfg, plan[i]);
        plan[i].tempo_bpm = ex.stream.tempo.front().bpm();
        plan[i].duration_s = ex.duration_seconds();
        files[i] = write_smf(ex.stream);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(work, w);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (std::size_t i = 0; i < plan.size(); ++i) save_smf(dir / plan[i].file, files[i]);
  std::ofstream m(dir / "manifest.csv", std::ios::binary);
  m << manifest_csv(plan);
  if (!m) throw IoError("cannot write " + (dir / "manifest.csv").string());
  return plan;
}

inline double mean_duration(const std::vector<StimulusEntry>& entries) {
  double s = 0;
  for (const auto& e : entries) s += e.duration_s;
  return entries.empty() ? 0 : s / static_cast<double>(entries.size());
}

}  // namespace affpop
