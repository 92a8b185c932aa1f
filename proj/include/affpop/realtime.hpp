/**
 * @file realtime.hpp
 * @brief Wall-clock stepping of the arranger for live steering.
 *
 * Each bar is rendered whole when the playhead reaches its downbeat (the one-bar
 * look-ahead). Emotion updates wait in a mailbox drained at every beat boundary:
 * velocity and tempo follow from that beat, harmony and patterns from the next bar.
 */
#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <variant>
#include <vector>

#include "affpop/config.hpp"
#include "affpop/engine.hpp"

namespace affpop {

struct BarMarker {
  double t = 0.0;
  std::int64_t index = 0;
  friend bool operator==(const BarMarker&, const BarMarker&) = default;
};

struct TempoMarker {
  double t = 0.0;
  Tick at = 0;
  std::uint32_t usec_per_quarter = 500000;
  double bpm() const { return 60'000'000.0 / usec_per_quarter; }
  friend bool operator==(const TempoMarker&, const TempoMarker&) = default;
};

/// Acknowledges the point that took effect at this beat.
struct EmotionAck {
  double t = 0.0;
  EmotionPoint point;
  friend bool operator==(const EmotionAck&, const EmotionAck&) = default;
};

struct ScheduledNote {
  double t = 0.0;
  double duration = 0.0;  // seconds at the onset beat's tempo
  NoteEvent event;
  friend bool operator==(const ScheduledNote&, const ScheduledNote&) = default;
};

using Frame = std::variant<BarMarker, TempoMarker, EmotionAck, ScheduledNote>;

inline double frame_time(const Frame& f) {
  return std::visit([](const auto& x) { return x.t; }, f);
}

/// Thread-safe single-slot inbox; the newest point wins.
class ControlMailbox {
 public:
  void post(EmotionPoint p) {
    std::lock_guard lock(mutex_);
    point_ = p;
  }
  void post_seed(std::uint64_t seed) {
    std::lock_guard lock(mutex_);
    seed_ = seed;
  }
  std::optional<EmotionPoint> take_point() {
    std::lock_guard lock(mutex_);
    return std::exchange(point_, std::nullopt);
  }
  std::optional<std::uint64_t> take_seed() {
    std::lock_guard lock(mutex_);
    return std::exchange(seed_, std::nullopt);
  }

 private:
  std::mutex mutex_;
  std::optional<EmotionPoint> point_;
  std::optional<std::uint64_t> seed_;
};

class RealtimeEngine {
 public:
  /// Open-ended live session starting at `initial`.
  RealtimeEngine(std::shared_ptr<const EngineConfig> config, std::uint64_t seed, EmotionPoint initial)
      : config_(std::move(config)), state_(initial_state(seed, initial)), active_(initial) {}

  /// Finite run that follows an excerpt's trajectory; matches generate_excerpt.
  RealtimeEngine(std::shared_ptr<const EngineConfig> config, const ExcerptSpec& spec)
      : config_(std::make_shared<const EngineConfig>(with_key(*config, spec.key))),
        state_(initial_state(spec.seed, spec.trajectory.at(0))),
        active_(spec.trajectory.at(0)),
        trajectory_(spec.trajectory),
        bar_limit_(spec.bars) {
    spec.validate();
  }

  RealtimeEngine(const RealtimeEngine&) = delete;
  RealtimeEngine& operator=(const RealtimeEngine&) = delete;

  /// Safe from any thread. Takes effect at the next beat boundary.
  void post(EmotionPoint p) { mailbox_.post(p); }
  /// Safe from any thread. Takes effect at the next bar boundary.
  void post_seed(std::uint64_t seed) { mailbox_.post_seed(seed); }

  double now() const noexcept { return now_; }
  bool finished() const noexcept { return finished_; }
  const EngineState& state() const noexcept { return state_; }
  EmotionPoint active_point() const noexcept { return active_; }
  std::int64_t current_bar() const noexcept { return beat_ / kBeatsPerBar; }
  const std::vector<BarInfo>& log() const noexcept { return log_; }

  /// Seconds of the beat currently playing at the present tempo.
  double bar_seconds() const noexcept { return kBeatsPerBar * static_cast<double>(beat_usec_) / 1e6; }

  /// Everything scheduled in [now, now + budget). Never blocks.
  std::vector<Frame> step(double budget) {
    std::vector<Frame> out;
    const double end = now_ + std::max(0.0, budget);
    if (!(end > now_)) return out;
    if (!started_) {
      started_ = true;
      enter_beat(0, out);
    }
    while (!finished_) {
      const Tick beat_end_tick = (beat_ + 1) * kTicksPerBeat;
      bool window_full = false;
      while (cursor_ < bar_events_.size() && bar_events_[cursor_].onset < beat_end_tick) {
        const auto& e = bar_events_[cursor_];
        const Tick into = e.onset - beat_ * kTicksPerBeat;
        const double t = seconds_within_beat(beat_start_usec_, into, beat_usec_);
        if (t >= end) {
          window_full = true;
          break;
        }
        out.push_back(schedule(e, t));
        ++cursor_;
      }
      if (window_full) break;
      const double beat_end = static_cast<double>(beat_start_usec_ + beat_usec_) / 1e6;
      if (beat_end >= end) break;
      enter_beat(beat_ + 1, out);
    }
    now_ = end;
    return out;
  }

 private:
  ScheduledNote schedule(NoteEvent e, double t) const {
    const auto& laws = config_->laws;
    const int accent = e.velocity - velocity_for(bar_point_.arousal(), laws);
    e.velocity = std::clamp(velocity_for(active_.arousal(), laws) + accent, 1, 127);
    const double dur = static_cast<double>(e.duration) * beat_usec_ / static_cast<double>(kTicksPerBeat) / 1e6;
    return {t, dur, e};
  }

  void enter_beat(std::int64_t beat, std::vector<Frame>& out) {
    if (beat > 0) beat_start_usec_ += beat_usec_;
    beat_ = beat;
    const double t = static_cast<double>(beat_start_usec_) / 1e6;

    std::optional<EmotionPoint> acked;
    if (auto p = mailbox_.take_point()) {
      active_ = *p;
      acked = p;
    }
    const bool downbeat = beat % kBeatsPerBar == 0;
    if (downbeat) {
      const std::int64_t bar = beat / kBeatsPerBar;
      if (bar_limit_ && bar >= *bar_limit_) {
        finished_ = true;
        return;
      }
      if (trajectory_) {
        if (auto k = trajectory_->keyframe(bar)) active_ = *k;
      }
      if (auto s = mailbox_.take_seed()) state_.seed = *s;
      state_.point = active_;
      auto r = render_bar(*config_, state_);
      bar_events_ = std::move(r.events);
      cursor_ = 0;
      bar_point_ = active_;
      log_.push_back(std::move(r.info));
      state_ = std::move(r.next);
      out.push_back(BarMarker{t, bar});
    }
    const std::uint32_t usec = usec_per_quarter(tempo_for(active_.arousal(), config_->laws));
    if (downbeat || usec != beat_usec_) out.push_back(TempoMarker{t, beat * kTicksPerBeat, usec});
    beat_usec_ = usec;
    if (acked) out.push_back(EmotionAck{t, *acked});
  }

  std::shared_ptr<const EngineConfig> config_;
  EngineState state_;
  EmotionPoint active_;
  EmotionPoint bar_point_;
  std::optional<EmotionTrajectory> trajectory_;
  std::optional<std::int64_t> bar_limit_;
  ControlMailbox mailbox_;

  bool started_ = false;
  bool finished_ = false;
  double now_ = 0.0;
  std::int64_t beat_ = 0;
  std::int64_t beat_start_usec_ = 0;
  std::uint32_t beat_usec_ = 0;
  std::vector<NoteEvent> bar_events_;
  std::size_t cursor_ = 0;
  std::vector<BarInfo> log_;
};

/// Notes of a frame sequence as an EventStream (tempo markers become the tempo map).
inline EventStream collect_stream(const std::vector<Frame>& frames) {
  EventStream s;
  for (const auto& f : frames) {
    if (const auto* n = std::get_if<ScheduledNote>(&f)) s.notes.push_back(n->event);
    if (const auto* m = std::get_if<TempoMarker>(&f)) s.tempo.push_back({m->at, m->usec_per_quarter});
  }
  std::sort(s.notes.begin(), s.notes.end());
  return s;
}

}  // namespace affpop
