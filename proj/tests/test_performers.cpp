#include <algorithm>
#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "affpop/default_config.hpp"
#include "affpop/performers.hpp"
#include "oracles.hpp"

using namespace affpop;
using namespace affpop::oracle;

namespace {

const Chord kC{"C", 0, Quality::major, "I"};
const Chord kAm{"Am", 9, Quality::minor, "vi"};

std::vector<PatternOnset> downbeat_only() { return {{0, kTicksPerBeat, true, std::nullopt}}; }

}  // namespace

TEST(BassNotes, DownbeatRootFrequency) {
  const int n = 100000;
  int roots = 0;
  const int root = bass_root_note(0);
  for (int i = 0; i < n; ++i) {
    auto rng = CounterRng::for_stream(2024, static_cast<std::uint64_t>(i), Stream::bass);
    roots += bass_notes(kC, downbeat_only(), rng).front().pitch == root;
  }
  EXPECT_NEAR(roots / double(n), 0.9, 0.01);
}

TEST(BassNotes, OffbeatsAreACoinToss) {
  const int n = 100000;
  int roots = 0;
  std::vector<PatternOnset> off{{kTicksPerBeat, kTicksPerBeat, false, std::nullopt}};
  CounterRng rng(77);
  for (int i = 0; i < n; ++i) roots += bass_notes(kC, off, rng).front().pitch == bass_root_note(0);
  EXPECT_NEAR(roots / double(n), 0.5, 0.01);
}

TEST(BassNotes, OnlyRootsAndFifths) {
  CounterRng rng(3);
  const auto bank = defaults::bass_bank();
  for (const auto& chord : defaults::chord_graph().vertices) {
    const auto tones = chord_tones(chord);
    for (int b = 0; b < 8; ++b)
      for (const auto& n : bass_notes(chord, bank.patterns[0][2].pattern.bar(b), rng)) {
        const int pc = pitch_class(n.pitch);
        EXPECT_TRUE(pc == tones[0] || pc == tones[2]) << chord.name;
      }
  }
  CounterRng r2(4);
  for (const auto& n : bass_notes(kC, bank.patterns[0][1].pattern.bar(0), r2)) {
    EXPECT_TRUE(pitch_class(n.pitch) == 0 || pitch_class(n.pitch) == 7);
  }
}

TEST(BassNotes, DeterministicForSeed) {
  const auto onsets = defaults::bass_bank().patterns[0][1].pattern.bar(0);
  CounterRng a(5), b(5);
  EXPECT_EQ(bass_notes(kC, onsets, a), bass_notes(kC, onsets, b));
}

TEST(PluckedNotes, SilentAtHighArousal) {
  CounterRng rng(1);
  EXPECT_TRUE(plucked_notes(kC, 0.8, 0.2, rng).empty());
  EXPECT_TRUE(plucked_notes(kC, 0.7, 0.3, rng).empty());
  EXPECT_FALSE(plucked_notes(kC, 0.69, 0.31, rng).empty());
}

TEST(PluckedNotes, ChordTonesEquiprobable) {
  std::map<int, int> counts;
  int total = 0;
  CounterRng rng(9);
  while (total < 100000) {
    for (const auto& n : plucked_notes(kC, 0.0, 1.0, rng)) {  // one onset per bar
      ++counts[pitch_class(n.pitch)];
      ++total;
    }
  }
  ASSERT_EQ(counts.size(), 3u);
  for (int pc : {0, 4, 7}) EXPECT_NEAR(counts[pc] / double(total), 1.0 / 3.0, 0.01) << pc;
}

TEST(PluckedNotes, OnsetCountFollowsRoughness) {
  CounterRng rng(2);
  for (double aro : {0.0, 0.25, 0.5, 0.65}) {
    const double r = roughness_for(aro);
    EXPECT_EQ(static_cast<int>(plucked_notes(kC, aro, r, rng).size()), density_from_roughness(r));
  }
}

TEST(Dissimilarity, Examples) {
  EXPECT_EQ(dissimilarity({{60, 64, 67}}, {{60, 64, 67}}), 0);
  EXPECT_EQ(dissimilarity({{60, 64, 67}}, {{60, 65, 69}}), 3);
  EXPECT_EQ(dissimilarity({{60, 64, 67}}, {{60, 64, 67, 70}}), 3);  // 67 doubled against 70
}

TEST(Dissimilarity, SymmetricAndZeroOnlyForIdentity) {
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<int> note(40, 90), size(3, 4);
  for (int i = 0; i < 2000; ++i) {
    auto make = [&] {
      std::set<int> s;
      const int k = size(gen);
      while (static_cast<int>(s.size()) < k) s.insert(note(gen));
      return Voicing{{s.begin(), s.end()}, 0};
    };
    const auto a = make(), b = make();
    EXPECT_EQ(dissimilarity(a, b), dissimilarity(b, a));
    EXPECT_EQ(dissimilarity(a, b), oracle_distance(a.notes, b.notes));
    EXPECT_EQ(dissimilarity(a, b) == 0, a.notes == b.notes);
  }
}

TEST(StrummedVoicing, CMajorToAMinor) {
  const auto v = strummed_voicing(Voicing{{60, 64, 67}, 0}, kAm);
  EXPECT_EQ(v.notes, (std::vector<int>{60, 64, 69}));
  EXPECT_EQ(v.inversion, 1);
  EXPECT_EQ(dissimilarity(Voicing{{60, 64, 67}, 0}, v), 2);
}

TEST(StrummedVoicing, SameChordKeepsItsVoicing) {
  for (const auto& v : voicing_candidates(kAm)) EXPECT_EQ(strummed_voicing(v, kAm), v);
}

TEST(StrummedVoicing, EmptyCandidateSetIsAConfigError) {
  EXPECT_THROW(strummed_voicing(Voicing{{60, 64, 67}, 0}, std::vector<Voicing>{}), ConfigError);
  EXPECT_THROW(strummed_voicing(Voicing{{60, 64, 67}, 0}, kC, VoicingRange{61, 63}), ConfigError);
}

TEST(StrummedVoicing, CandidatesMatchTheEnumeratedSpace) {
  for (const auto& chord : defaults::chord_graph().vertices) {
    const auto cands = voicing_candidates(chord);
    const auto all = enumerate_voicings(chord, 48, 67);
    ASSERT_EQ(cands.size(), all.size()) << chord.name;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      EXPECT_EQ(cands[i].notes, all[i].notes);
      EXPECT_EQ(cands[i].inversion, all[i].inversion);
    }
  }
}

TEST(StrummedVoicing, MatchesExhaustiveSearchOnRandomInstances) {
  std::mt19937_64 gen(20240501);
  std::uniform_int_distribution<int> root(0, 11), quality(0, 5), note(36, 84), size(3, 4);
  for (int i = 0; i < 1000; ++i) {
    std::set<int> s;
    const int k = size(gen);
    while (static_cast<int>(s.size()) < k) s.insert(note(gen));
    const Voicing prev{{s.begin(), s.end()}, 0};
    const Chord chord{"x", root(gen), static_cast<Quality>(quality(gen)), "I"};
    const auto got = strummed_voicing(prev, chord);
    const auto want = oracle_best(prev.notes, chord, 48, 67);
    ASSERT_EQ(got.notes, want.notes) << "instance " << i;
    ASSERT_EQ(got.inversion, want.inversion) << "instance " << i;
  }
}

TEST(RegisterStep, HoldProbabilityIndependentOfValence) {
  for (double val : {0.0, 0.5, 1.0}) {
    CounterRng rng(31);
    const int n = 100000;
    int held = 0;
    for (int i = 0; i < n; ++i) held += register_step(1, val, 2, rng) == 1;
    EXPECT_NEAR(held / double(n), 0.6, 0.01) << val;
  }
}

TEST(RegisterStep, ConditionalUpProbabilityEqualsValence) {
  for (double val : {0.0, 0.5, 1.0}) {
    CounterRng rng(32);
    int up = 0, moved = 0;
    for (int i = 0; i < 100000; ++i) {
      const int r = register_step(1, val, 2, rng);
      if (r != 1) ++moved;
      if (r == 2) ++up;
    }
    ASSERT_GT(moved, 0);
    EXPECT_NEAR(up / double(moved), val, 0.01) << val;
  }
}

TEST(RegisterStep, FullValenceNeverMovesDown) {
  CounterRng rng(33);
  std::map<int, int> seen;
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++seen[register_step(1, 1.0, 2, rng)];
  EXPECT_EQ(seen[0], 0);
  EXPECT_NEAR(seen[1] / double(n), 0.6, 0.01);
  EXPECT_NEAR(seen[2] / double(n), 0.4, 0.01);
}

TEST(RegisterStep, HalfValenceSplitsTheMoveEvenly) {
  CounterRng rng(34);
  std::map<int, int> seen;
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++seen[register_step(1, 0.5, 2, rng)];
  EXPECT_NEAR(seen[0] / double(n), 0.2, 0.01);
  EXPECT_NEAR(seen[2] / double(n), 0.2, 0.01);
}

TEST(RegisterStep, BlockedMovesAreNoOpsAndChainStaysInRange) {
  CounterRng rng(35);
  for (int i = 0; i < 10000; ++i) {
    EXPECT_EQ(register_step(0, 0.0, 2, rng), 0);
    EXPECT_EQ(register_step(2, 1.0, 2, rng), 2);
  }
  int inv = 0;
  std::uniform_real_distribution<double> u(0, 1);
  std::mt19937_64 gen(3);
  for (int i = 0; i < 100000; ++i) {
    inv = register_step(inv, u(gen), 3, rng);
    ASSERT_GE(inv, 0);
    ASSERT_LE(inv, 3);
  }
}

TEST(Melody, ValenceRegionSelection) {
  const auto m = defaults::melody();
  EXPECT_EQ(m.region_of(0.5), 0u);
  EXPECT_EQ(m.region_of(0.51), 1u);
  EXPECT_EQ(m.valence_regions.label(0), "low");
  EXPECT_TRUE(m.violations().empty());
  EXPECT_EQ(m.alphabet.front(), 60);
  EXPECT_EQ(m.alphabet.back(), 84);
  EXPECT_EQ(m.alphabet.size(), 15u);
}

TEST(Melody, SnapToNearestAlphabetPitch) {
  const auto m = defaults::melody();
  EXPECT_EQ(m.alphabet[m.snap(59)], 60);
  EXPECT_EQ(m.alphabet[m.snap(61)], 60);  // tie resolves downward
  EXPECT_EQ(m.alphabet[m.snap(66)], 65);
  EXPECT_EQ(m.alphabet[m.snap(100)], 84);
  EXPECT_EQ(m.alphabet[m.snap(72)], 72);
}

TEST(Melody, TransitionFrequenciesMatchMatrixRows) {
  const auto m = defaults::melody();
  for (std::size_t region = 0; region < 2; ++region) {
    for (std::size_t from : {std::size_t{0}, std::size_t{7}, std::size_t{14}}) {
      std::vector<int> counts(m.alphabet.size());
      CounterRng rng(100 + region * 20 + from);
      const int n = 100000;
      for (int i = 0; i < n; ++i) ++counts[melody_step(m, region, from, rng)];
      for (std::size_t j = 0; j < counts.size(); ++j)
        EXPECT_NEAR(counts[j] / double(n), m.matrices[region].rows[from][j], 0.01);
    }
  }
}

TEST(Melody, ChainTransitionsOverALongWalk) {
  const auto m = defaults::melody();
  const std::size_t region = 1;
  std::vector<std::vector<int>> counts(m.alphabet.size(), std::vector<int>(m.alphabet.size()));
  CounterRng rng(5150);
  std::size_t s = 7;
  for (int i = 0; i < 100000; ++i) {
    const std::size_t t = melody_step(m, region, s, rng);
    ++counts[s][t];
    s = t;
  }
  for (std::size_t i = 0; i < counts.size(); ++i) {
    int row = 0;
    for (int c : counts[i]) row += c;
    if (row < 10000) continue;
    for (std::size_t j = 0; j < counts.size(); ++j)
      EXPECT_NEAR(counts[i][j] / double(row), m.matrices[region].rows[i][j], 0.015);
  }
}

TEST(Melody, FirstHalfShape) {
  const auto m = defaults::melody();
  CounterRng rng(8);
  const double r = 0.5;
  const auto half = melody_first_half(0.7, 72, m, r, rng);
  EXPECT_EQ(static_cast<int>(half.notes.size()), 4 * density_from_roughness(r));
  for (const auto& n : half.notes) {
    EXPECT_TRUE(std::find(m.alphabet.begin(), m.alphabet.end(), n.pitch) != m.alphabet.end());
    EXPECT_LT(n.onset, 4 * kTicksPerBar);
    EXPECT_LE(n.onset % kTicksPerBar + n.duration, kTicksPerBar);
  }
  EXPECT_EQ(half.last_pitch, half.notes.back().pitch);
}

TEST(Motifs, RegionBoundariesAndBankShape) {
  const auto bank = defaults::motifs();
  EXPECT_TRUE(bank.violations().empty());
  CounterRng rng(1);
  EXPECT_EQ(select_motif(bank, 0.30, rng).region, 1u);
  EXPECT_EQ(select_motif(bank, 0.29, rng).region, 0u);
  EXPECT_EQ(select_motif(bank, 0.60, rng).region, 2u);
  for (const auto& set : bank.motifs) EXPECT_EQ(set.size(), 3u);
}

TEST(Motifs, HighRegionSelectionIsUniform) {
  const auto bank = defaults::motifs();
  std::map<std::size_t, int> counts;
  CounterRng rng(21);
  const int n = 30000;
  for (int i = 0; i < n; ++i) {
    const auto r = select_motif(bank, 0.9, rng);
    ASSERT_EQ(r.region, 2u);
    ++counts[r.index];
  }
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(counts[k] / double(n), 1.0 / 3.0, 0.02);
}

TEST(Motifs, SecondHalfIsVerbatimAndDeterministic) {
  const auto bank = defaults::motifs();
  CounterRng a(4), b(4), c(4);
  const auto notes = melody_second_half(0.5, bank, a);
  EXPECT_EQ(notes, melody_second_half(0.5, bank, b));
  EXPECT_EQ(notes, bank.at(select_motif(bank, 0.5, c)).notes);
}
