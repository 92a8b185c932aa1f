/**
 * @file config.hpp
 * @brief Engine configuration: every table the arranger reads, its validation and JSON schema.
 *
 * All musical data is written in C major and transposed to the configured key at output.
 */
#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "affpop/emotion.hpp"
#include "affpop/error.hpp"
#include "affpop/harmony.hpp"
#include "affpop/performers.hpp"
#include "affpop/rhythm.hpp"

namespace affpop {

inline constexpr int kConfigSchemaVersion = 1;

enum class Mode { major, minor };

struct Key {
  int tonic = 0;  // pitch class
  Mode mode = Mode::major;

  /// Semitone shift from the C-major source material, kept within [-5, 6].
  int transpose_offset() const {
    const int pc = pitch_class(tonic + (mode == Mode::minor ? 3 : 0));
    return pc > 6 ? pc - 12 : pc;
  }
  friend bool operator==(const Key&, const Key&) = default;
};

struct EngineConfig {
  int schema_version = kConfigSchemaVersion;
  Key key;
  ParameterLaws laws;
  ChordGraph graph;
  SectionTemplate form;
  MelodyModel melody;
  MotifBank motifs;
  PatternBank bass;
  PatternBank strummed;
  PatternBank percussion;
  VoicingRange voicing_range;

  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    auto add = [&out](const std::vector<std::string>& v, const std::string& prefix) {
      for (const auto& s : v) out.push_back(prefix + s);
    };
    if (schema_version != kConfigSchemaVersion)
      out.push_back("unsupported schema_version " + std::to_string(schema_version));
    if (key.tonic < 0 || key.tonic > 11) out.emplace_back("key tonic must be a pitch class 0-11");
    if (!(laws.tempo_min_bpm > 0.0) || !(laws.tempo_max_bpm > laws.tempo_min_bpm))
      out.emplace_back("tempo range must satisfy 0 < min < max");
    if (!(laws.roughness_floor >= 0.0 && laws.roughness_floor <= 1.0)) out.emplace_back("roughness_floor outside [0, 1]");
    add(validate_graph(graph), "chord graph: ");
    add(validate_template(graph, form), "template: ");
    add(melody.violations(), "melody: ");
    add(motifs.violations(), "motifs: ");
    add(bass.violations(), "");
    add(strummed.violations(), "");
    add(percussion.violations(), "");
    add(percussion_density_ordering(percussion), "percussion density: ");
    if (voicing_range.bass_high - voicing_range.bass_low < 11)
      out.emplace_back("voicing range must span at least an octave");

    if (bass.patterns.size() != 1 || bass.patterns[0].size() != 3) {
      out.emplace_back("bass bank must hold one region with 3 patterns");
    } else {
      for (const auto& p : bass.patterns[0]) {
        if (std::abs(p.probability - 1.0 / 3.0) > 1e-9) out.emplace_back("bass patterns must be equiprobable");
        if (p.pattern.length_bars != 8) out.emplace_back("bass patterns span 8 bars");
      }
    }
    if (percussion.patterns.size() != 3 || percussion.patterns[0].size() != 1 ||
        percussion.patterns[1].size() != 1 || percussion.patterns[2].size() != 3) {
      out.emplace_back("percussion bank must hold 1 low, 1 moderate and 3 high patterns");
    } else {
      for (const auto& p : percussion.patterns[2])
        if (std::abs(p.probability - 1.0 / 3.0) > 1e-9) out.emplace_back("high percussion patterns must be equiprobable");
    }
    for (const auto& set : percussion.patterns)
      for (const auto& p : set)
        for (const auto& o : p.pattern.onsets)
          if (!o.voice) out.push_back("percussion pattern '" + p.pattern.name + "' has an onset without a voice");
    return out;
  }

  void validate() const {
    if (auto v = violations(); !v.empty()) throw ConfigError(std::move(v));
  }

  friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

// ---------------------------------------------------------------------------
// JSON schema

namespace json_detail {

using nlohmann::json;

inline Tick beats_to_ticks(double beats, const std::string& where) {
  const double t = beats * static_cast<double>(kTicksPerBeat);
  const double r = std::round(t);
  if (std::abs(t - r) > 1e-6) throw ConfigError(where + ": " + std::to_string(beats) + " beats is off the tick grid");
  return static_cast<Tick>(r);
}

inline double ticks_to_beats(Tick t) { return static_cast<double>(t) / static_cast<double>(kTicksPerBeat); }

inline json regions_to_json(const RegionSpec& spec) {
  json a = json::array();
  for (const auto& r : spec.regions())
    a.push_back({{"label", r.label},
                 {"lower", r.lower},
                 {"upper", r.upper},
                 {"lower_inclusive", r.lower_inclusive},
                 {"upper_inclusive", r.upper_inclusive}});
  return a;
}

inline RegionSpec regions_from_json(const json& j) {
  std::vector<Region> out;
  for (const auto& r : j)
    out.push_back({r.at("label").get<std::string>(), r.at("lower").get<double>(), r.at("upper").get<double>(),
                   r.at("lower_inclusive").get<bool>(), r.at("upper_inclusive").get<bool>()});
  return RegionSpec(std::move(out));
}

inline json pattern_to_json(const RhythmPattern& p) {
  json onsets = json::array();
  for (const auto& o : p.onsets) {
    json e = json::array({ticks_to_beats(o.offset), ticks_to_beats(o.duration)});
    if (o.voice) e.push_back(std::string(to_string(*o.voice)));
    if (o.accent) e.push_back("accent");
    onsets.push_back(std::move(e));
  }
  return {{"name", p.name}, {"bars", p.length_bars}, {"onsets", std::move(onsets)}};
}

inline RhythmPattern pattern_from_json(const json& j) {
  RhythmPattern p;
  p.name = j.at("name").get<std::string>();
  p.length_bars = j.at("bars").get<int>();
  for (const auto& e : j.at("onsets")) {
    if (!e.is_array() || e.size() < 2) throw ConfigError("pattern '" + p.name + "': onset must be [beat, dur, ...]");
    PatternOnset o;
    o.offset = beats_to_ticks(e[0].get<double>(), p.name);
    o.duration = beats_to_ticks(e[1].get<double>(), p.name);
    for (std::size_t i = 2; i < e.size(); ++i) {
      const auto tag = e[i].get<std::string>();
      if (tag == "accent") o.accent = true;
      else o.voice = drum_voice_from_string(tag);
    }
    p.onsets.push_back(o);
  }
  return p;
}

inline json bank_to_json(const PatternBank& b) {
  json sets = json::array();
  for (const auto& set : b.patterns) {
    json a = json::array();
    for (const auto& wp : set) {
      json p = pattern_to_json(wp.pattern);
      p["probability"] = wp.probability;
      a.push_back(std::move(p));
    }
    sets.push_back(std::move(a));
  }
  return {{"instrument", b.instrument}, {"regions", regions_to_json(b.regions)}, {"patterns", std::move(sets)}};
}

inline PatternBank bank_from_json(const json& j) {
  PatternBank b;
  b.instrument = j.at("instrument").get<std::string>();
  b.regions = regions_from_json(j.at("regions"));
  for (const auto& set : j.at("patterns")) {
    std::vector<WeightedPattern> v;
    for (const auto& p : set) v.push_back({pattern_from_json(p), p.at("probability").get<double>()});
    b.patterns.push_back(std::move(v));
  }
  return b;
}

inline json graph_to_json(const ChordGraph& g) {
  json chords = json::array();
  for (const auto& c : g.vertices)
    chords.push_back({{"name", c.name}, {"root", c.root}, {"quality", std::string(to_string(c.quality))}, {"function", c.function}});
  auto row_to_json = [&g](const std::vector<Edge>& row) {
    json a = json::array();
    for (const auto& e : row) a.push_back({{"to", g.vertices.at(e.to).name}, {"p", e.probability}});
    return a;
  };
  json start = json::object();
  json edges = json::object();
  for (std::size_t b = 0; b < g.bands.size(); ++b) {
    const auto& label = g.bands.label(b);
    if (b < g.start.size()) start[label] = row_to_json(g.start[b]);
    json table = json::object();
    if (b < g.edges.size())
      for (std::size_t v = 0; v < g.edges[b].size(); ++v) table[g.vertices[v].name] = row_to_json(g.edges[b][v]);
    edges[label] = std::move(table);
  }
  return {{"bands", regions_to_json(g.bands)}, {"chords", chords}, {"start", start}, {"edges", edges}};
}

inline ChordGraph graph_from_json(const json& j) {
  ChordGraph g;
  g.bands = regions_from_json(j.at("bands"));
  for (const auto& c : j.at("chords"))
    g.vertices.push_back({c.at("name").get<std::string>(), c.at("root").get<int>(),
                          quality_from_string(c.at("quality").get<std::string>()), c.at("function").get<std::string>()});
  auto vertex = [&g](const std::string& name) {
    auto i = g.find(name);
    if (!i) throw ConfigError("chord graph: unknown chord '" + name + "'");
    return *i;
  };
  auto row_from_json = [&](const json& a) {
    std::vector<Edge> row;
    for (const auto& e : a) row.push_back({vertex(e.at("to").get<std::string>()), e.at("p").get<double>()});
    return row;
  };
  for (std::size_t b = 0; b < g.bands.size(); ++b) {
    const auto& label = g.bands.label(b);
    if (j.contains("start") && j.at("start").contains(label)) g.start.push_back(row_from_json(j.at("start").at(label)));
    std::vector<std::vector<Edge>> table(g.vertices.size());
    if (j.at("edges").contains(label)) {
      for (const auto& [name, row] : j.at("edges").at(label).items()) table[vertex(name)] = row_from_json(row);
    }
    g.edges.push_back(std::move(table));
  }
  return g;
}

inline json notes_to_json(const std::vector<TimedNote>& notes) {
  json a = json::array();
  for (const auto& n : notes) a.push_back(json::array({ticks_to_beats(n.onset), ticks_to_beats(n.duration), n.pitch}));
  return a;
}

inline std::vector<TimedNote> notes_from_json(const json& a, const std::string& where) {
  std::vector<TimedNote> out;
  for (const auto& e : a) {
    if (!e.is_array() || e.size() != 3) throw ConfigError(where + ": note must be [beat, dur, pitch]");
    TimedNote n;
    n.onset = beats_to_ticks(e[0].get<double>(), where);
    n.duration = beats_to_ticks(e[1].get<double>(), where);
    n.pitch = e[2].get<int>();
    n.accent = n.onset % kTicksPerBar == 0;
    out.push_back(n);
  }
  return out;
}

}  // namespace json_detail

inline nlohmann::json to_json(const EngineConfig& c) {
  using namespace json_detail;
  json matrices = json::object();
  for (std::size_t r = 0; r < c.melody.matrices.size(); ++r)
    matrices[c.melody.valence_regions.label(r)] = c.melody.matrices[r].rows;
  json motif_sets = json::array();
  for (const auto& set : c.motifs.motifs) {
    json a = json::array();
    for (const auto& m : set) a.push_back({{"name", m.name}, {"notes", notes_to_json(m.notes)}});
    motif_sets.push_back(std::move(a));
  }
  return {
      {"schema_version", c.schema_version},
      {"key", {{"tonic", c.key.tonic}, {"mode", c.key.mode == Mode::major ? "major" : "minor"}}},
      {"laws",
       {{"tempo_min_bpm", c.laws.tempo_min_bpm},
        {"tempo_max_bpm", c.laws.tempo_max_bpm},
        {"velocity_base", c.laws.velocity_base},
        {"velocity_span", c.laws.velocity_span},
        {"accent_offset", c.laws.accent_offset},
        {"roughness_floor", c.laws.roughness_floor}}},
      {"voicing_range", {{"bass_low", c.voicing_range.bass_low}, {"bass_high", c.voicing_range.bass_high}}},
      {"chord_graph", graph_to_json(c.graph)},
      {"template", {{"A", c.form.section_a}, {"B", c.form.section_b}}},
      {"melody",
       {{"alphabet", c.melody.alphabet},
        {"regions", regions_to_json(c.melody.valence_regions)},
        {"matrices", matrices}}},
      {"motifs", {{"regions", regions_to_json(c.motifs.regions)}, {"sets", motif_sets}}},
      {"rhythm", {{"bass", bank_to_json(c.bass)}, {"strummed", bank_to_json(c.strummed)}, {"percussion", bank_to_json(c.percussion)}}},
  };
}

/// Parses and validates. Any schema or invariant failure raises ConfigError.
inline EngineConfig config_from_json(const nlohmann::json& j) {
  using namespace json_detail;
  EngineConfig c;
  try {
    c.schema_version = j.at("schema_version").get<int>();
    if (c.schema_version != kConfigSchemaVersion)
      throw ConfigError("unsupported schema_version " + std::to_string(c.schema_version));
    const auto& key = j.at("key");
    c.key.tonic = key.at("tonic").get<int>();
    const auto mode = key.at("mode").get<std::string>();
    if (mode != "major" && mode != "minor") throw ConfigError("key mode must be major or minor");
    c.key.mode = mode == "major" ? Mode::major : Mode::minor;
    const auto& laws = j.at("laws");
    c.laws.tempo_min_bpm = laws.at("tempo_min_bpm").get<double>();
    c.laws.tempo_max_bpm = laws.at("tempo_max_bpm").get<double>();
    c.laws.velocity_base = laws.at("velocity_base").get<double>();
    c.laws.velocity_span = laws.at("velocity_span").get<double>();
    c.laws.accent_offset = laws.at("accent_offset").get<int>();
    c.laws.roughness_floor = laws.at("roughness_floor").get<double>();
    c.voicing_range.bass_low = j.at("voicing_range").at("bass_low").get<int>();
    c.voicing_range.bass_high = j.at("voicing_range").at("bass_high").get<int>();
    c.graph = graph_from_json(j.at("chord_graph"));
    c.form.section_a = j.at("template").at("A").get<std::vector<std::string>>();
    c.form.section_b = j.at("template").at("B").get<std::vector<std::string>>();
    const auto& mel = j.at("melody");
    c.melody.alphabet = mel.at("alphabet").get<std::vector<int>>();
    c.melody.valence_regions = regions_from_json(mel.at("regions"));
    for (std::size_t r = 0; r < c.melody.valence_regions.size(); ++r)
      c.melody.matrices.push_back(
          {mel.at("matrices").at(c.melody.valence_regions.label(r)).get<std::vector<std::vector<double>>>()});
    c.motifs.regions = regions_from_json(j.at("motifs").at("regions"));
    for (const auto& set : j.at("motifs").at("sets")) {
      std::vector<Motif> v;
      for (const auto& m : set) {
        const auto name = m.at("name").get<std::string>();
        v.push_back({name, notes_from_json(m.at("notes"), name)});
      }
      c.motifs.motifs.push_back(std::move(v));
    }
    c.bass = bank_from_json(j.at("rhythm").at("bass"));
    c.strummed = bank_from_json(j.at("rhythm").at("strummed"));
    c.percussion = bank_from_json(j.at("rhythm").at("percussion"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("schema: ") + e.what());
  }
  c.validate();
  return c;
}

inline EngineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace affpop
