#pragma once

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "affpop/emotion.hpp"
#include "affpop/error.hpp"

namespace affpop {

// Trajectory file: {"version": 1, "points": [{"bar": 0, "valence": 0.2, "arousal": 0.7}, ...]}

inline nlohmann::json trajectory_to_json(const EmotionTrajectory& t) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& e : t.entries())
    points.push_back({{"bar", e.bar}, {"valence", e.point.valence()}, {"arousal", e.point.arousal()}});
  return {{"version", 1}, {"points", points}};
}

inline EmotionTrajectory trajectory_from_json(const nlohmann::json& j) {
  try {
    std::vector<EmotionTrajectory::Entry> entries;
    for (const auto& p : j.at("points"))
      entries.push_back({p.at("bar").get<std::int64_t>(),
                         EmotionPoint(p.at("valence").get<double>(), p.at("arousal").get<double>())});
    return EmotionTrajectory(std::move(entries));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("trajectory: ") + e.what());
  }
}

inline EmotionTrajectory load_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trajectory file " + path.string());
  try {
    return trajectory_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace affpop
