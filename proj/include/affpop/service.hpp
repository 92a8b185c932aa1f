#pragma once

#include <cstdint>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "affpop/realtime.hpp"
#include "affpop/wire.hpp"

namespace affpop {

inline constexpr const char* kVersion = "1.0.0";

/// One live engine plus its playhead. Frames run one bar ahead of the playhead;
/// the playhead advances with wall time only while a client is attached and not paused.
class Session {
 public:
  Session(std::string id, std::shared_ptr<const EngineConfig> config, std::uint64_t seed, EmotionPoint initial,
          double created_at)
      : id_(std::move(id)), seed_(seed), laws_(config->laws), engine_(std::move(config), seed, initial),
        created_at_(created_at),
        idle_since_(created_at) {}

  const std::string& id() const noexcept { return id_; }
  std::uint64_t seed() const noexcept { return seed_; }
  double created_at() const noexcept { return created_at_; }

  /// Applies one client frame received at `wall_now`. Returns frames to send back at once (an error frame, if any).
  std::vector<std::string> handle(const std::string& text, double wall_now) {
    std::lock_guard lock(mutex_);
    advance_locked(wall_now);
    try {
      std::visit(
          [this](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, EmotionMessage>) engine_.post(m.point);
            else if constexpr (std::is_same_v<T, SeekSeedMessage>) engine_.post_seed(m.seed);
            else if constexpr (std::is_same_v<T, PauseMessage>) paused_ = true;
            else paused_ = false;
          },
          parse_control(text));
    } catch (const DataError& e) {
      return {error_frame(e.what())};
    }
    return {};
  }

  /// Moves the playhead to `wall_now` and returns every frame now inside the look-ahead window.
  std::vector<std::string> pump(double wall_now) {
    std::lock_guard lock(mutex_);
    advance_locked(wall_now);
    const double target = playhead_ + lookahead_locked();
    std::vector<std::string> out;
    if (target > engine_.now())
      for (const auto& f : engine_.step(target - engine_.now())) out.push_back(frame_to_line(f));
    return out;
  }

  /// Seconds of look-ahead: one bar at the current tempo.
  double lookahead() const {
    std::lock_guard lock(mutex_);
    return lookahead_locked();
  }

  bool paused() const {
    std::lock_guard lock(mutex_);
    return paused_;
  }
  double playhead() const {
    std::lock_guard lock(mutex_);
    return playhead_;
  }
  double engine_time() const {
    std::lock_guard lock(mutex_);
    return engine_.now();
  }
  int clients() const {
    std::lock_guard lock(mutex_);
    return clients_;
  }
  double idle_since() const {
    std::lock_guard lock(mutex_);
    return idle_since_;
  }
  EngineState state() const {
    std::lock_guard lock(mutex_);
    return engine_.state();
  }

  /// At most one streaming client per session.
  bool attach(double wall_now) {
    std::lock_guard lock(mutex_);
    if (clients_ > 0) return false;
    ++clients_;
    last_wall_ = wall_now;
    return true;
  }

  void detach(double wall_now) {
    std::lock_guard lock(mutex_);
    if (clients_ == 0) return;
    if (last_wall_ && !paused_) playhead_ += std::max(0.0, wall_now - *last_wall_);
    --clients_;
    last_wall_.reset();
    idle_since_ = wall_now;
  }

 private:
  void advance_locked(double wall_now) {
    if (clients_ == 0) return;
    if (last_wall_ && !paused_) playhead_ += std::max(0.0, wall_now - *last_wall_);
    last_wall_ = wall_now;
  }

  double lookahead_locked() const {
    const double bpm = tempo_for(engine_.active_point().arousal(), laws_);
    return kBeatsPerBar * static_cast<double>(usec_per_quarter(bpm)) / 1e6;
  }

  mutable std::mutex mutex_;
  std::string id_;
  std::uint64_t seed_;
  ParameterLaws laws_;
  RealtimeEngine engine_;
  double created_at_;
  double idle_since_;
  double playhead_ = 0.0;
  std::optional<double> last_wall_;
  int clients_ = 0;
  bool paused_ = false;
};

struct SessionOptions {
  std::optional<std::uint64_t> seed;
  EmotionPoint initial{0.5, 0.5};
};

class SessionRegistry {
 public:
  explicit SessionRegistry(std::shared_ptr<const EngineConfig> config, double keepalive_seconds = 60.0)
      : config_(std::move(config)), keepalive_(keepalive_seconds) {}

  std::shared_ptr<Session> create(const SessionOptions& opts, double wall_now) {
    std::lock_guard lock(mutex_);
    std::string id;
    do {
      id = random_id();
    } while (sessions_.contains(id));
    const std::uint64_t seed = opts.seed ? *opts.seed : (std::uint64_t{rd_()} << 32 | rd_());
    auto s = std::make_shared<Session>(id, config_, seed, opts.initial, wall_now);
    sessions_.emplace(id, s);
    return s;
  }

  std::shared_ptr<Session> find(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return sessions_.size();
  }

  /// Drops sessions with no client that have been idle longer than the keep-alive.
  std::size_t reap(double wall_now) {
    std::lock_guard lock(mutex_);
    std::size_t n = 0;
    for (auto it = sessions_.begin(); it != sessions_.end();) {
      if (it->second->clients() == 0 && wall_now - it->second->idle_since() > keepalive_) {
        it = sessions_.erase(it);
        ++n;
      } else {
        ++it;
      }
    }
    return n;
  }

  double keepalive() const noexcept { return keepalive_; }

 private:
  std::string random_id() {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%08x%08x", rd_(), rd_());
    return buf;
  }

  std::shared_ptr<const EngineConfig> config_;
  double keepalive_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::random_device rd_;
};

}  // namespace affpop
