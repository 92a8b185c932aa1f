/**
 * @file performers.hpp
 * @brief Per-instrument note generation: bass, plucked and strummed guitar, doubled melody.
 *
 * Notes come back relative to the start of the bar (or of the 4-bar half section for
 * the melody helpers). The arranger offsets them into excerpt time.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "affpop/emotion.hpp"
#include "affpop/error.hpp"
#include "affpop/harmony.hpp"
#include "affpop/rhythm.hpp"
#include "affpop/rng.hpp"

namespace affpop {

struct TimedNote {
  Tick onset = 0;
  Tick duration = kTicksPerSlot;
  int pitch = 60;
  bool accent = false;

  friend bool operator==(const TimedNote&, const TimedNote&) = default;
};

// ---------------------------------------------------------------------------
// Bass

inline constexpr double kBassDownbeatRootProbability = 0.9;

/// Bass register: roots sit in A1..G#2 so the fifth above stays below the guitars.
inline int bass_root_note(int pitch_class_value) { return 33 + pitch_class(pitch_class_value - 9); }

/// Roots and fifths only. The downbeat takes the root with p = 0.9; other onsets toss a coin.
template <std::uniform_random_bit_generator Rng>
std::vector<TimedNote> bass_notes(const Chord& chord, const std::vector<PatternOnset>& bar_onsets, Rng& rng) {
  const int root = bass_root_note(chord.root);
  const auto tones = chord_tones(chord);
  const int fifth = root + pitch_class(tones.at(2) - chord.root);
  std::vector<TimedNote> out;
  out.reserve(bar_onsets.size());
  for (const auto& o : bar_onsets) {
    const double p_root = o.offset == 0 ? kBassDownbeatRootProbability : 0.5;
    out.push_back({o.offset, o.duration, bernoulli(rng, p_root) ? root : fifth, o.accent});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Voicings and voice leading

struct Voicing {
  std::vector<int> notes;  // strictly ascending MIDI notes
  int inversion = 0;

  int bass() const { return notes.empty() ? 0 : notes.front(); }
  friend bool operator==(const Voicing&, const Voicing&) = default;
};

struct VoicingRange {
  int bass_low = 48;
  int bass_high = 67;
  friend bool operator==(const VoicingRange&, const VoicingRange&) = default;
};

/// Close-position voicing of `chord` in `inversion` with the given bass note.
inline Voicing close_voicing(const Chord& chord, int inversion, int bass_note) {
  const auto tones = chord_tones(chord);
  const auto n = static_cast<int>(tones.size());
  Voicing v;
  v.inversion = inversion;
  v.notes.push_back(bass_note);
  for (int k = 1; k < n; ++k) {
    const int pc = tones[static_cast<std::size_t>((inversion + k) % n)];
    int note = v.notes.back() + 1;
    while (pitch_class(note) != pc) ++note;
    v.notes.push_back(note);
  }
  return v;
}

/// Every close-position voicing whose bass lies in range, ordered by bass note.
/// Restricting to one inversion is how the register walk steers the guitar.
inline std::vector<Voicing> voicing_candidates(const Chord& chord, VoicingRange range = {},
                                               std::optional<int> only_inversion = std::nullopt) {
  const auto tones = chord_tones(chord);
  std::vector<Voicing> out;
  for (int bass = range.bass_low; bass <= range.bass_high; ++bass) {
    for (int inv = 0; inv < static_cast<int>(tones.size()); ++inv) {
      if (only_inversion && inv != *only_inversion) continue;
      if (pitch_class(bass) == tones[static_cast<std::size_t>(inv)]) out.push_back(close_voicing(chord, inv, bass));
    }
  }
  return out;
}

/// Voice-wise semitone distance; the shorter voicing is padded by repeating its top note.
inline int dissimilarity(const Voicing& a, const Voicing& b) {
  if (a.notes.empty() || b.notes.empty()) throw std::invalid_argument("dissimilarity: empty voicing");
  const std::size_t n = std::max(a.notes.size(), b.notes.size());
  int total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int x = i < a.notes.size() ? a.notes[i] : a.notes.back();
    const int y = i < b.notes.size() ? b.notes[i] : b.notes.back();
    total += std::abs(x - y);
  }
  return total;
}

/// The candidate least dissimilar to `prev`; ties go to the lowest bass, then the lowest inversion.
inline Voicing strummed_voicing(const Voicing& prev, const std::vector<Voicing>& candidates) {
  if (candidates.empty()) throw ConfigError("strummed_voicing: no candidate voicings in range");
  const Voicing* best = nullptr;
  int best_d = std::numeric_limits<int>::max();
  for (const auto& c : candidates) {
    const int d = dissimilarity(prev, c);
    if (!best || d < best_d || (d == best_d && (c.bass() < best->bass() ||
                                                (c.bass() == best->bass() && c.inversion < best->inversion)))) {
      best = &c;
      best_d = d;
    }
  }
  return *best;
}

inline Voicing strummed_voicing(const Voicing& prev, const Chord& next, VoicingRange range = {}) {
  return strummed_voicing(prev, voicing_candidates(next, range));
}

inline constexpr double kRegisterHoldProbability = 0.6;

/// One step of the inversion walk: hold with p = 0.6, otherwise up with probability
/// `valence` and down with 1 - valence. Moves past either end are dropped.
template <std::uniform_random_bit_generator Rng>
int register_step(int current, double valence, int max_inversion, Rng& rng) {
  current = std::clamp(current, 0, max_inversion);
  if (bernoulli(rng, kRegisterHoldProbability)) return current;
  const int next = bernoulli(rng, clamp_unit(valence)) ? current + 1 : current - 1;
  return (next < 0 || next > max_inversion) ? current : next;
}

// ---------------------------------------------------------------------------
// Plucked guitar

inline constexpr double kPluckedMaxArousal = 0.7;

/// Chord tones at random, equiprobable; silent at arousal >= 0.7. Each tone sounds an
/// octave above its place in the strummed voicing so the register walk carries over.
template <std::uniform_random_bit_generator Rng>
std::vector<TimedNote> plucked_notes(const Chord& chord, double arousal, double roughness, Rng& rng,
                                     const Voicing& register_ref = {}) {
  if (clamp_unit(arousal) >= kPluckedMaxArousal) return {};
  const auto tones = chord_tones(chord);
  const auto slots = place_onsets(density_from_roughness(roughness), rng);
  std::vector<TimedNote> out;
  for (int slot : slots) {
    const int pc = tones[uniform_index(rng, tones.size())];
    int pitch = 60 + pc;
    for (int n : register_ref.notes)
      if (pitch_class(n) == pc) pitch = n + 12;
    out.push_back({slot * kTicksPerSlot, kTicksPerSlot, pitch, slot == 0});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Melody

/// Row-stochastic matrix over a melodic alphabet.
struct TransitionMatrix {
  std::vector<std::vector<double>> rows;

  std::vector<std::string> violations(std::size_t alphabet_size, const std::string& where) const {
    std::vector<std::string> out;
    if (rows.size() != alphabet_size)
      out.push_back(where + ": " + std::to_string(rows.size()) + " rows for alphabet of " +
                    std::to_string(alphabet_size));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != alphabet_size) out.push_back(where + ": row " + std::to_string(i) + " has wrong width");
      double sum = 0.0;
      for (double p : rows[i]) {
        if (!(p >= 0.0)) out.push_back(where + ": negative entry in row " + std::to_string(i));
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9) out.push_back(where + ": row " + std::to_string(i) + " sums to " + std::to_string(sum));
    }
    return out;
  }

  friend bool operator==(const TransitionMatrix&, const TransitionMatrix&) = default;
};

/// One transition matrix per valence region over a shared pitch alphabet.
struct MelodyModel {
  std::vector<int> alphabet;  // ascending MIDI notes
  RegionSpec valence_regions;
  std::vector<TransitionMatrix> matrices;

  std::size_t region_of(double valence) const { return valence_regions.classify(valence); }

  /// Nearest alphabet index; equidistant pitches resolve downward.
  std::size_t snap(int pitch) const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < alphabet.size(); ++i)
      if (std::abs(alphabet[i] - pitch) < std::abs(alphabet[best] - pitch)) best = i;
    return best;
  }

  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    if (alphabet.empty()) out.emplace_back("melody alphabet is empty");
    for (std::size_t i = 1; i < alphabet.size(); ++i)
      if (alphabet[i] <= alphabet[i - 1]) out.emplace_back("melody alphabet not strictly ascending");
    for (auto& v : valence_regions.violations()) out.push_back("melody regions: " + v);
    if (matrices.size() != valence_regions.size()) out.emplace_back("one melody matrix per valence region required");
    for (std::size_t m = 0; m < matrices.size(); ++m) {
      auto v = matrices[m].violations(alphabet.size(), "melody matrix " + std::to_string(m));
      out.insert(out.end(), v.begin(), v.end());
    }
    return out;
  }

  friend bool operator==(const MelodyModel&, const MelodyModel&) = default;
};

/// Next alphabet index from `from` under matrix `region`.
template <std::uniform_random_bit_generator Rng>
std::size_t melody_step(const MelodyModel& model, std::size_t region, std::size_t from, Rng& rng) {
  return weighted_index(rng, model.matrices.at(region).rows.at(from));
}

struct MelodyBar {
  std::vector<TimedNote> notes;
  int last_pitch = 0;
};

/// One bar of Markov melody: onset count from roughness, notes held until the next onset.
template <std::uniform_random_bit_generator Rng>
MelodyBar melody_bar(const MelodyModel& model, double valence, int prev_pitch, double roughness, Rng& rng) {
  const std::size_t region = model.region_of(valence);
  const auto slots = place_onsets(density_from_roughness(roughness), rng);
  std::size_t state = model.snap(prev_pitch);
  MelodyBar bar;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    state = melody_step(model, region, state, rng);
    const Tick onset = slots[i] * kTicksPerSlot;
    const Tick end = i + 1 < slots.size() ? slots[i + 1] * kTicksPerSlot : kTicksPerBar;
    bar.notes.push_back({onset, end - onset, model.alphabet[state], i == 0});
  }
  bar.last_pitch = model.alphabet[state];
  return bar;
}

/// Four bars of matrix-driven melody, onsets relative to the first bar.
template <std::uniform_random_bit_generator Rng>
MelodyBar melody_first_half(double valence, int prev_pitch, const MelodyModel& model, double roughness, Rng& rng) {
  MelodyBar out;
  out.last_pitch = prev_pitch;
  for (int b = 0; b < 4; ++b) {
    auto bar = melody_bar(model, valence, out.last_pitch, roughness, rng);
    for (auto n : bar.notes) {
      n.onset += b * kTicksPerBar;
      out.notes.push_back(n);
    }
    out.last_pitch = bar.last_pitch;
  }
  return out;
}

struct Motif {
  std::string name;
  std::vector<TimedNote> notes;  // onsets from motif start, within 4 bars

  /// Notes of bar `bar` (0..3) relative to that bar.
  std::vector<TimedNote> bar(int bar) const {
    std::vector<TimedNote> out;
    for (auto n : notes) {
      if (n.onset >= bar * kTicksPerBar && n.onset < (bar + 1) * kTicksPerBar) {
        n.onset -= bar * kTicksPerBar;
        out.push_back(n);
      }
    }
    return out;
  }

  friend bool operator==(const Motif&, const Motif&) = default;
};

inline constexpr std::size_t kMotifsPerRegion = 3;

struct MotifBank {
  RegionSpec regions;
  std::vector<std::vector<Motif>> motifs;  // per region, equiprobable

  const Motif& at(PatternRef r) const { return motifs.at(r.region).at(r.index); }

  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    for (auto& v : regions.violations()) out.push_back("motif regions: " + v);
    if (motifs.size() != regions.size()) out.emplace_back("motif bank needs one motif set per region");
    for (std::size_t r = 0; r < motifs.size(); ++r) {
      if (motifs[r].size() != kMotifsPerRegion)
        out.push_back("motif region " + std::to_string(r) + " holds " + std::to_string(motifs[r].size()) +
                      " motifs, expected 3");
      for (const auto& m : motifs[r]) {
        for (std::size_t i = 0; i < m.notes.size(); ++i) {
          const auto& n = m.notes[i];
          if (n.onset < 0 || n.duration <= 0 || n.onset + n.duration > 4 * kTicksPerBar)
            out.push_back("motif '" + m.name + "': note outside its four bars");
          if (n.onset % kTicksPerBar + n.duration > kTicksPerBar)
            out.push_back("motif '" + m.name + "': note crosses a barline");
          if (i > 0 && n.onset < m.notes[i - 1].onset + m.notes[i - 1].duration)
            out.push_back("motif '" + m.name + "': overlapping notes");
        }
      }
    }
    return out;
  }

  friend bool operator==(const MotifBank&, const MotifBank&) = default;
};

template <std::uniform_random_bit_generator Rng>
PatternRef select_motif(const MotifBank& bank, double arousal, Rng& rng) {
  const std::size_t region = bank.regions.classify(arousal);
  return {region, uniform_index(rng, bank.motifs.at(region).size())};
}

/// A composed motif picked uniformly from the arousal region, emitted verbatim.
template <std::uniform_random_bit_generator Rng>
std::vector<TimedNote> melody_second_half(double arousal, const MotifBank& bank, Rng& rng) {
  return bank.at(select_motif(bank, arousal, rng)).notes;
}

}  // namespace affpop
