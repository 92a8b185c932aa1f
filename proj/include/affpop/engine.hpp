/**
 * @file engine.hpp
 * @brief Bar-by-bar arranger: one call renders every track for one bar.
 *
 * Randomness is keyed by (seed, bar, stream), so an EngineState fully determines
 * everything rendered from it onward.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "affpop/config.hpp"
#include "affpop/emotion.hpp"
#include "affpop/harmony.hpp"
#include "affpop/performers.hpp"
#include "affpop/rhythm.hpp"
#include "affpop/rng.hpp"

namespace affpop {

enum class Track { percussion, bass, strummed_gtr, plucked_gtr, violins, french_horn };

inline constexpr std::array<Track, 6> kTracks = {Track::percussion,  Track::bass,    Track::strummed_gtr,
                                                 Track::plucked_gtr, Track::violins, Track::french_horn};
inline constexpr std::array<std::string_view, 6> kTrackNames = {"percussion",  "bass",    "strummed_gtr",
                                                                "plucked_gtr", "violins", "french_horn"};

inline std::string_view to_string(Track t) { return kTrackNames[static_cast<std::size_t>(t)]; }

inline std::optional<Track> track_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kTrackNames.size(); ++i)
    if (kTrackNames[i] == s) return static_cast<Track>(i);
  return std::nullopt;
}

struct NoteEvent {
  Track track = Track::bass;
  int pitch = 60;
  int velocity = 64;
  Tick onset = 0;  // from excerpt start, kTicksPerBeat per beat
  Tick duration = kTicksPerBeat;

  /// Canonical stream order: time, then track, then pitch.
  friend auto operator<=>(const NoteEvent& a, const NoteEvent& b) {
    return std::tie(a.onset, a.track, a.pitch, a.duration, a.velocity) <=>
           std::tie(b.onset, b.track, b.pitch, b.duration, b.velocity);
  }
  friend bool operator==(const NoteEvent&, const NoteEvent&) = default;
};

struct TempoChange {
  Tick at = 0;
  std::uint32_t usec_per_quarter = 500000;

  double bpm() const { return 60'000'000.0 / usec_per_quarter; }
  friend bool operator==(const TempoChange&, const TempoChange&) = default;
};

inline std::uint32_t usec_per_quarter(double bpm) { return static_cast<std::uint32_t>(std::lround(60'000'000.0 / bpm)); }

/// Onset in microseconds of a position inside a beat that starts at `beat_start_usec`.
inline double seconds_within_beat(std::int64_t beat_start_usec, Tick ticks_into_beat, std::uint32_t usec) {
  return (static_cast<double>(beat_start_usec) +
          static_cast<double>(ticks_into_beat) * usec / static_cast<double>(kTicksPerBeat)) /
         1e6;
}

/// Timed notes plus the tempo map that places them in seconds.
struct EventStream {
  std::vector<NoteEvent> notes;
  std::vector<TempoChange> tempo;

  /// Tempo changes collapsed to the points where the value actually changes.
  std::vector<TempoChange> tempo_changes() const {
    std::vector<TempoChange> out;
    for (const auto& t : tempo)
      if (out.empty() || out.back().usec_per_quarter != t.usec_per_quarter) out.push_back(t);
    return out;
  }

  std::uint32_t usec_at(Tick tick) const {
    std::uint32_t u = 500000;
    for (const auto& t : tempo) {
      if (t.at > tick) break;
      u = t.usec_per_quarter;
    }
    return u;
  }

  /// Seconds from the start, integrating the tempo map beat by beat.
  double seconds_at(Tick tick) const {
    std::int64_t beat_start = 0;
    Tick beat = 0;
    while ((beat + 1) * kTicksPerBeat <= tick) {
      beat_start += usec_at(beat * kTicksPerBeat);
      ++beat;
    }
    return seconds_within_beat(beat_start, tick - beat * kTicksPerBeat, usec_at(beat * kTicksPerBeat));
  }

  friend bool operator==(const EventStream&, const EventStream&) = default;
};

enum class MelodyMode { matrix, motif };

/// What the arranger decided for one bar. Used for logs and structural checks.
struct BarInfo {
  std::int64_t bar = 0;
  std::size_t chord = 0;
  std::string function;
  EmotionPoint point;
  double bpm = 0.0;
  int inversion = 0;
  PatternRef strummed;
  PatternRef bass;
  PatternRef percussion;
  MelodyMode melody = MelodyMode::matrix;
  std::optional<PatternRef> motif;
  std::size_t melody_region = 0;

  friend bool operator==(const BarInfo&, const BarInfo&) = default;
};

/// Everything needed to render the next bar.
struct EngineState {
  std::uint64_t seed = 0;
  std::int64_t bar = 0;               // next bar to render
  std::optional<std::size_t> chord;   // previous bar's chord vertex
  int inversion = 0;
  Voicing voicing;                    // previous strummed voicing, C-major space
  int melody_pitch = 72;
  PatternRef bass_pattern;
  PatternRef percussion_pattern;
  PatternRef motif;
  EmotionPoint point;                 // governs the next bar

  friend bool operator==(const EngineState&, const EngineState&) = default;
};

inline EngineState initial_state(std::uint64_t seed, EmotionPoint point = {}) {
  EngineState s;
  s.seed = seed;
  s.point = point;
  return s;
}

/// Structure follows the new point from the next rendered bar on.
inline EngineState update_emotion(EngineState state, EmotionPoint point) {
  state.point = point;
  return state;
}

struct BarRender {
  std::vector<NoteEvent> events;  // sorted, excerpt time
  BarInfo info;
  EngineState next;
};

namespace detail {

/// Same-pitch notes on a track never overlap: earlier notes are cut at the next onset.
inline void resolve_overlaps(std::vector<NoteEvent>& events) {
  std::sort(events.begin(), events.end(), [](const NoteEvent& a, const NoteEvent& b) {
    return std::tie(a.track, a.pitch, a.onset) < std::tie(b.track, b.pitch, b.onset);
  });
  std::vector<NoteEvent> out;
  for (const auto& e : events) {
    if (!out.empty() && out.back().track == e.track && out.back().pitch == e.pitch) {
      auto& prev = out.back();
      if (prev.onset == e.onset) continue;
      if (prev.onset + prev.duration > e.onset) prev.duration = e.onset - prev.onset;
    }
    out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  events = std::move(out);
}

}  // namespace detail

/// Renders bar `state.bar` under `state.point` and returns the advanced state.
inline BarRender render_bar(const EngineConfig& cfg, const EngineState& state) {
  const std::int64_t bar = state.bar;
  const int section_bar = static_cast<int>(bar % 8);
  const double valence = state.point.valence();
  const double arousal = state.point.arousal();
  const double roughness = roughness_for(arousal, cfg.laws);
  const Tick bar_start = bar * kTicksPerBar;
  const int shift = cfg.key.transpose_offset();
  const auto ubar = static_cast<std::uint64_t>(bar);

  BarRender r;
  r.next = state;
  auto& next = r.next;
  auto& info = r.info;
  info.bar = bar;
  info.point = state.point;
  info.bpm = tempo_for(arousal, cfg.laws);

  // Harmony
  const auto& function = cfg.form.function_at(bar);
  auto harmony_rng = CounterRng::for_stream(state.seed, ubar, Stream::harmony);
  const std::size_t chord_index = state.chord ? next_chord(cfg.graph, *state.chord, valence, harmony_rng, function)
                                              : first_chord(cfg.graph, valence, harmony_rng, function);
  const Chord& chord = cfg.graph.vertices[chord_index];
  next.chord = chord_index;
  info.chord = chord_index;
  info.function = function;

  // Section-level pattern choices
  auto bass_rng = CounterRng::for_stream(state.seed, ubar, Stream::bass);
  auto perc_rng = CounterRng::for_stream(state.seed, ubar, Stream::percussion);
  if (section_bar == 0) {
    next.bass_pattern = select_pattern(cfg.bass, arousal, bass_rng);
    next.percussion_pattern = select_pattern(cfg.percussion, arousal, perc_rng);
  }
  info.bass = next.bass_pattern;
  info.percussion = next.percussion_pattern;

  const int base_velocity = velocity_for(arousal, cfg.laws);
  const int accent_velocity = std::min(127, base_velocity + cfg.laws.accent_offset);
  auto emit = [&](Track track, const TimedNote& n, bool transpose = true) {
    const int pitch = std::clamp(n.pitch + (transpose ? shift : 0), 0, 127);
    r.events.push_back({track, pitch, n.accent ? accent_velocity : base_velocity, bar_start + n.onset,
                        std::min(n.duration, kTicksPerBar - n.onset)});
  };

  // Strummed guitar: register walk, then the closest voicing in that inversion
  const int max_inversion = static_cast<int>(chord_tones(chord).size()) - 1;
  auto register_rng = CounterRng::for_stream(state.seed, ubar, Stream::register_shift);
  next.inversion = register_step(state.inversion, valence, max_inversion, register_rng);
  const Voicing prev = state.voicing.notes.empty() ? Voicing{{60, 64, 67}, 0} : state.voicing;
  next.voicing = strummed_voicing(prev, voicing_candidates(chord, cfg.voicing_range, next.inversion));
  info.inversion = next.inversion;

  auto strum_rng = CounterRng::for_stream(state.seed, ubar, Stream::strummed);
  info.strummed = select_pattern(cfg.strummed, arousal, strum_rng);
  for (const auto& o : cfg.strummed.at(info.strummed).onsets)
    for (int note : next.voicing.notes) emit(Track::strummed_gtr, {o.offset, o.duration, note, o.accent});

  // Bass
  for (const auto& n : bass_notes(chord, cfg.bass.at(next.bass_pattern).bar(section_bar), bass_rng))
    emit(Track::bass, n);

  // Percussion
  for (const auto& o : cfg.percussion.at(next.percussion_pattern).bar(section_bar))
    emit(Track::percussion, {o.offset, o.duration, drum_note(o.voice.value_or(DrumVoice::kick)), o.accent}, false);

  // Plucked guitar
  auto pluck_rng = CounterRng::for_stream(state.seed, ubar, Stream::plucked);
  for (const auto& n : plucked_notes(chord, arousal, roughness, pluck_rng, next.voicing)) emit(Track::plucked_gtr, n);

  // Melody, doubled on violins and horn
  auto melody_rng = CounterRng::for_stream(state.seed, ubar, Stream::melody);
  std::vector<TimedNote> melody;
  info.melody_region = cfg.melody.region_of(valence);
  if (section_bar < 4) {
    info.melody = MelodyMode::matrix;
    auto m = melody_bar(cfg.melody, valence, state.melody_pitch, roughness, melody_rng);
    melody = std::move(m.notes);
    next.melody_pitch = m.last_pitch;
  } else {
    info.melody = MelodyMode::motif;
    if (section_bar == 4) next.motif = select_motif(cfg.motifs, arousal, melody_rng);
    info.motif = next.motif;
    melody = cfg.motifs.at(next.motif).bar(section_bar - 4);
    if (!melody.empty()) next.melody_pitch = melody.back().pitch;
  }
  for (const auto& n : melody) {
    emit(Track::violins, n);
    emit(Track::french_horn, n);
  }

  detail::resolve_overlaps(r.events);
  next.bar = bar + 1;
  return r;
}

struct ExcerptSpec {
  int bars = 8;
  EmotionTrajectory trajectory = EmotionTrajectory::constant({});
  std::uint64_t seed = 0;
  std::optional<Key> key;  // overrides the config key when set

  void validate() const {
    if (!is_supported_length(static_cast<std::size_t>(std::max(bars, 0))))
      throw InputError("excerpt length must be 4, 8, 16 or 32 bars, got " + std::to_string(bars));
    if (trajectory.empty()) throw InputError("excerpt needs a trajectory");
    if (trajectory.last_bar() >= bars)
      throw InputError("trajectory reaches bar " + std::to_string(trajectory.last_bar()) + " of a " +
                       std::to_string(bars) + "-bar excerpt");
  }
};

struct Excerpt {
  int bars = 0;
  std::uint64_t seed = 0;
  EventStream stream;
  std::vector<BarInfo> log;

  double duration_seconds() const { return stream.seconds_at(bars * kTicksPerBar); }
};

inline EngineConfig with_key(EngineConfig cfg, const std::optional<Key>& key) {
  if (key) cfg.key = *key;
  return cfg;
}

/// Renders a whole excerpt with one tempo change per bar.
inline Excerpt generate_excerpt(const EngineConfig& config, const ExcerptSpec& spec) {
  spec.validate();
  const EngineConfig cfg = with_key(config, spec.key);
  Excerpt ex;
  ex.bars = spec.bars;
  ex.seed = spec.seed;
  EngineState state = initial_state(spec.seed, spec.trajectory.at(0));
  for (int b = 0; b < spec.bars; ++b) {
    state.point = spec.trajectory.at(b);
    auto r = render_bar(cfg, state);
    ex.stream.tempo.push_back({b * kTicksPerBar, usec_per_quarter(r.info.bpm)});
    ex.stream.notes.insert(ex.stream.notes.end(), r.events.begin(), r.events.end());
    ex.log.push_back(std::move(r.info));
    state = std::move(r.next);
  }
  std::sort(ex.stream.notes.begin(), ex.stream.notes.end());
  return ex;
}

// ---------------------------------------------------------------------------
// State serialization

inline nlohmann::json to_json(const EngineState& s) {
  using nlohmann::json;
  auto ref = [](PatternRef r) { return json::array({r.region, r.index}); };
  return {{"seed", s.seed},
          {"bar", s.bar},
          {"chord", s.chord ? json(*s.chord) : json(nullptr)},
          {"inversion", s.inversion},
          {"voicing", {{"notes", s.voicing.notes}, {"inversion", s.voicing.inversion}}},
          {"melody_pitch", s.melody_pitch},
          {"bass_pattern", ref(s.bass_pattern)},
          {"percussion_pattern", ref(s.percussion_pattern)},
          {"motif", ref(s.motif)},
          {"valence", s.point.valence()},
          {"arousal", s.point.arousal()}};
}

inline EngineState state_from_json(const nlohmann::json& j) {
  auto ref = [](const nlohmann::json& a) { return PatternRef{a.at(0).get<std::size_t>(), a.at(1).get<std::size_t>()}; };
  EngineState s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.bar = j.at("bar").get<std::int64_t>();
  if (!j.at("chord").is_null()) s.chord = j.at("chord").get<std::size_t>();
  s.inversion = j.at("inversion").get<int>();
  s.voicing.notes = j.at("voicing").at("notes").get<std::vector<int>>();
  s.voicing.inversion = j.at("voicing").at("inversion").get<int>();
  s.melody_pitch = j.at("melody_pitch").get<int>();
  s.bass_pattern = ref(j.at("bass_pattern"));
  s.percussion_pattern = ref(j.at("percussion_pattern"));
  s.motif = ref(j.at("motif"));
  s.point = EmotionPoint(j.at("valence").get<double>(), j.at("arousal").get<double>());
  return s;
}

}  // namespace affpop
