#include <map>
#include <set>

#include <gtest/gtest.h>

#include "affpop/default_config.hpp"
#include "affpop/harmony.hpp"

using namespace affpop;

namespace {

ChordGraph single_vertex_graph() {
  ChordGraph g;
  g.vertices = {{"C", 0, Quality::major, "I"}};
  g.bands = RegionSpec::from_cuts({"all"}, {}, {});
  g.edges = {{{{0, 1.0}}}};
  g.start = {{{0, 1.0}}};
  return g;
}

std::string joined(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += x + "\n";
  return s;
}

bool contains_substring(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& x : v)
    if (x.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST(ChordTones, TheoryDefinitions) {
  EXPECT_EQ(chord_tones({"C", 0, Quality::major, "I"}), (std::vector<int>{0, 4, 7}));
  EXPECT_EQ(chord_tones({"Am", 9, Quality::minor, "vi"}), (std::vector<int>{9, 0, 4}));
  EXPECT_EQ(chord_tones({"G7", 7, Quality::dominant7, "V"}), (std::vector<int>{7, 11, 2, 5}));
  EXPECT_EQ(chord_tones({"Cmaj7", 0, Quality::major7, "I"}), (std::vector<int>{0, 4, 7, 11}));
  EXPECT_EQ(chord_tones({"Dm7", 2, Quality::minor7, "ii"}), (std::vector<int>{2, 5, 9, 0}));
  EXPECT_EQ(chord_tones({"Bdim", 11, Quality::diminished, "V"}), (std::vector<int>{11, 2, 5}));
}

TEST(ChordTones, AlwaysThreeOrFourDistinct) {
  for (const auto& c : defaults::chord_graph().vertices) {
    const auto t = chord_tones(c);
    EXPECT_TRUE(t.size() == 3 || t.size() == 4);
    EXPECT_EQ(std::set<int>(t.begin(), t.end()).size(), t.size()) << c.name;
  }
}

TEST(ValidateGraph, ShippedGraphIsValid) {
  const auto v = validate_graph(defaults::chord_graph());
  EXPECT_TRUE(v.empty()) << joined(v);
  const auto t = validate_template(defaults::chord_graph(), defaults::form());
  EXPECT_TRUE(t.empty()) << joined(t);
}

TEST(ValidateGraph, RowSummingToPointNineIsReported) {
  ChordGraph g = single_vertex_graph();
  g.vertices.push_back({"G", 7, Quality::major, "V"});
  g.edges = {{{{0, 0.5}, {1, 0.4}}, {{0, 1.0}}}};
  g.start = {{{0, 1.0}}};
  const auto v = validate_graph(g);
  EXPECT_TRUE(contains_substring(v, "row sums to 0.9")) << joined(v);
}

TEST(ValidateGraph, SingleVertexSelfLoopIsValid) {
  EXPECT_TRUE(validate_graph(single_vertex_graph()).empty());
}

TEST(ValidateGraph, ReportsEveryViolation) {
  ChordGraph g;
  g.vertices = {{"C", 0, Quality::major, "I"}, {"F", 5, Quality::major, "IV"}, {"G", 7, Quality::major, "V"}};
  g.bands = RegionSpec::from_cuts({"all"}, {}, {});
  // C -> F only, F is a dead end, G -> C with a bad sum; G unreachable from C.
  g.edges = {{{{1, 1.0}}, {}, {{0, 0.7}}}};
  const auto v = validate_graph(g);
  EXPECT_TRUE(contains_substring(v, "dead end")) << joined(v);
  EXPECT_TRUE(contains_substring(v, "row sums to 0.7")) << joined(v);
  EXPECT_TRUE(contains_substring(v, "unreachable")) << joined(v);
  EXPECT_GE(v.size(), 3u);
}

TEST(ShippedGraph, FunctionLevelTablesMatchTheDocumentedWeights) {
  const auto g = defaults::chord_graph();
  auto fn_mass = [&](std::size_t band, const std::string& from, const std::string& to_fn) {
    double s = 0;
    for (const auto& e : g.edges[band][*g.find(from)])
      if (g.vertices[e.to].function == to_fn) s += e.probability;
    return s;
  };
  EXPECT_NEAR(fn_mass(0, "C", "vi"), 0.40, 1e-12);
  EXPECT_NEAR(fn_mass(0, "Am", "ii"), 0.35, 1e-12);
  EXPECT_NEAR(fn_mass(1, "C", "IV"), 0.35, 1e-12);
  EXPECT_NEAR(fn_mass(1, "F", "V"), 0.40, 1e-12);
  EXPECT_NEAR(fn_mass(1, "G", "I"), 0.50, 1e-12);
}

TEST(NextChord, DeterministicEdge) {
  const auto g = single_vertex_graph();
  CounterRng rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(next_chord(g, g.vertices[0], 0.3, rng).name, "C");
}

TEST(NextChord, UnknownCurrentIsALogicError) {
  const auto g = defaults::chord_graph();
  CounterRng rng(1);
  EXPECT_THROW(next_chord(g, Chord{"X", 1, Quality::major, "I"}, 0.5, rng), std::logic_error);
  EXPECT_THROW(next_chord(g, std::size_t{99}, 0.5, rng), std::logic_error);
}

TEST(NextChord, GoldenSequenceSeed42) {
  const auto g = defaults::chord_graph();
  CounterRng rng(42);
  std::vector<std::string> got;
  Chord c = g.vertices[*g.find("C")];
  for (int i = 0; i < 8; ++i) {
    c = next_chord(g, c, 0.8, rng);
    got.push_back(c.name);
  }
  const std::vector<std::string> golden = {"G7", "C", "F", "Dm", "C", "Am", "Dm7", "G7"};
  EXPECT_EQ(got, golden);
  CounterRng again(42);
  EXPECT_EQ(next_chord(g, g.vertices[*g.find("C")], 0.8, again).name, golden.front());
}

TEST(NextChord, EmpiricalFrequenciesMatchEdgeProbabilities) {
  const auto g = defaults::chord_graph();
  for (const char* from : {"C", "Am", "G7"}) {
    for (double val : {0.2, 0.8}) {
      const std::size_t f = *g.find(from);
      const auto& row = g.edges[g.band_of(val)][f];
      std::map<std::size_t, int> counts;
      CounterRng rng(7 + f);
      const int n = 100000;
      for (int i = 0; i < n; ++i) ++counts[next_chord(g, f, val, rng)];
      for (const auto& e : row)
        EXPECT_NEAR(counts[e.to] / double(n), e.probability, 0.01) << from << " -> " << g.vertices[e.to].name;
      int total = 0;
      for (const auto& e : row) total += counts[e.to];
      EXPECT_EQ(total, n) << "sample outside the row's support";
    }
  }
}

TEST(NextChord, FunctionFilterRenormalizes) {
  const auto g = defaults::chord_graph();
  const std::size_t c = *g.find("C");
  const auto cands = candidates(g, c, 1, std::string_view("IV"));
  double mass = 0;
  for (const auto& e : cands) mass += e.probability;
  std::map<std::size_t, int> counts;
  CounterRng rng(3);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[next_chord(g, c, 0.9, rng, std::string_view("IV"))];
  for (const auto& e : cands) EXPECT_NEAR(counts[e.to] / double(n), e.probability / mass, 0.01);
  for (const auto& [v, k] : counts) EXPECT_EQ(g.vertices[v].function, "IV");
}

TEST(SectionTemplate, AabbFormOfThirtyTwoBars) {
  const auto t = defaults::form();
  const auto f = t.form();
  ASSERT_EQ(f.size(), 32u);
  for (int i = 0; i < 8; ++i) {
    EXPECT_EQ(f[i], f[i + 8]);
    EXPECT_EQ(f[i + 16], f[i + 24]);
  }
  EXPECT_NE(std::vector<std::string>(f.begin(), f.begin() + 8), std::vector<std::string>(f.begin() + 16, f.begin() + 24));
  EXPECT_EQ(t.function_at(32), t.function_at(0));
}

TEST(ProgressionFor, FigureTwoValenceArray) {
  const auto g = defaults::chord_graph();
  const auto t = defaults::form();
  const std::vector<double> vals = {0.1, 0.8, 0.7, 0.8};
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    CounterRng rng(seed);
    const auto prog = progression_for(t, 4, vals, g, rng);
    ASSERT_EQ(prog.size(), 4u);
    EXPECT_EQ(g.band_of(vals[0]), 0u);
    // bar 1 from the low band's start row
    bool in_low_start = false;
    for (const auto& e : candidates(g, std::nullopt, 0, t.function_at(0)))
      in_low_start |= g.vertices[e.to] == prog[0];
    EXPECT_TRUE(in_low_start);
    // bars 2-4 from the high band's edges
    for (std::size_t i = 1; i < 4; ++i) {
      EXPECT_EQ(g.band_of(vals[i]), 1u);
      bool in_high = false;
      for (const auto& e : candidates(g, g.index_of(prog[i - 1]), 1, t.function_at(i)))
        in_high |= g.vertices[e.to] == prog[i];
      EXPECT_TRUE(in_high) << "bar " << i + 1;
    }
  }
}

TEST(ProgressionFor, LowBandOpensOnMinorMoreOftenThanHighBand) {
  const auto g = defaults::chord_graph();
  const auto t = defaults::form();
  int cm_low = 0, cm_high = 0;
  for (std::uint64_t seed = 0; seed < 5000; ++seed) {
    CounterRng a(seed), b(seed);
    cm_low += progression_for(t, 4, {0.1, 0.1, 0.1, 0.1}, g, a)[0].name == "Cm";
    cm_high += progression_for(t, 4, {0.9, 0.9, 0.9, 0.9}, g, b)[0].name == "Cm";
  }
  EXPECT_GT(cm_low, 4 * cm_high);
}

TEST(ProgressionFor, LengthMismatchIsAnInputError) {
  const auto g = defaults::chord_graph();
  CounterRng rng(1);
  EXPECT_THROW(progression_for(defaults::form(), 4, {0.1, 0.2, 0.3, 0.4, 0.5}, g, rng), InputError);
  EXPECT_THROW(progression_for(defaults::form(), 5, {0.1, 0.2, 0.3, 0.4, 0.5}, g, rng), InputError);
}

TEST(ProgressionFor, DeterministicAndFollowsTemplate) {
  const auto g = defaults::chord_graph();
  const auto t = defaults::form();
  const std::vector<double> vals(32, 1.0);
  CounterRng a(99), b(99);
  const auto p1 = progression_for(t, 32, vals, g, a);
  const auto p2 = progression_for(t, 32, vals, g, b);
  EXPECT_EQ(p1, p2);
  for (std::size_t i = 0; i < 32; ++i) EXPECT_EQ(p1[i].function, t.function_at(static_cast<std::int64_t>(i)));
}
