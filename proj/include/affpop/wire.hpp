/**
 * @file wire.hpp
 * @brief Newline-delimited JSON frames for streamed output and live control input.
 */
#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "affpop/realtime.hpp"

namespace affpop {

inline nlohmann::json frame_to_json(const Frame& frame) {
  using nlohmann::json;
  return std::visit(
      [](const auto& f) -> json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, BarMarker>) {
          return {{"type", "bar"}, {"t", f.t}, {"index", f.index}};
        } else if constexpr (std::is_same_v<T, TempoMarker>) {
          return {{"type", "tempo"}, {"t", f.t}, {"bpm", f.bpm()}};
        } else if constexpr (std::is_same_v<T, EmotionAck>) {
          return {{"type", "emotion"}, {"t", f.t}, {"valence", f.point.valence()}, {"arousal", f.point.arousal()}};
        } else {
          return {{"type", "note"},
                  {"t", f.t},
                  {"track", std::string(to_string(f.event.track))},
                  {"pitch", f.event.pitch},
                  {"vel", f.event.velocity},
                  {"dur", f.duration}};
        }
      },
      frame);
}

/// One compact JSON object, no trailing newline.
inline std::string frame_to_line(const Frame& frame) { return frame_to_json(frame).dump(); }

inline void write_ndjson(std::ostream& out, const std::vector<Frame>& frames) {
  for (const auto& f : frames) out << frame_to_line(f) << '\n';
}

inline std::string error_frame(const std::string& message) {
  return nlohmann::json{{"type", "error"}, {"message", message}}.dump();
}

struct EmotionMessage {
  EmotionPoint point;
};
struct SeekSeedMessage {
  std::uint64_t seed = 0;
};
struct PauseMessage {};
struct ResumeMessage {};

using ControlMessage = std::variant<EmotionMessage, SeekSeedMessage, PauseMessage, ResumeMessage>;

/// Parses one client frame. Throws DataError with a client-facing reason.
inline ControlMessage parse_control(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception&) {
    throw DataError("malformed JSON");
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) throw DataError("message needs a string 'type'");
  const auto type = j["type"].get<std::string>();
  auto number = [&j](const char* field) {
    if (!j.contains(field) || !j[field].is_number()) throw DataError(std::string("'") + field + "' must be a number");
    return j[field].get<double>();
  };
  if (type == "emotion") return EmotionMessage{EmotionPoint(number("valence"), number("arousal"))};
  if (type == "seek_seed") {
    if (!j.contains("seed") || !j["seed"].is_number_integer()) throw DataError("'seed' must be an integer");
    return SeekSeedMessage{j["seed"].get<std::uint64_t>()};
  }
  if (type == "pause") return PauseMessage{};
  if (type == "resume") return ResumeMessage{};
  throw DataError("unknown message type '" + type + "'");
}

}  // namespace affpop
