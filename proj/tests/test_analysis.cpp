#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "affpop/analysis.hpp"
#include "oracles.hpp"

using namespace affpop;
using namespace affpop::oracle;

namespace {

RatingsTable parse(const std::string& text) {
  std::istringstream in(text);
  return read_ratings_csv(in);
}

std::string data_error(const std::string& text) {
  try {
    analyze(parse(text));
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Analysis, NormalizationIsExact) {
  for (int raw = 1; raw <= 9; ++raw) {
    EXPECT_EQ(normalize_rating(raw), (raw - 1) / 8.0);
    EXPECT_EQ(denormalize_rating(normalize_rating(raw)), raw);
  }
  EXPECT_EQ(normalize_rating(1), 0.0);
  EXPECT_EQ(normalize_rating(5), 0.5);
  EXPECT_EQ(normalize_rating(9), 1.0);
  EXPECT_THROW(normalize_rating(0), DataError);
  EXPECT_THROW(normalize_rating(10), DataError);
}

TEST(Analysis, PerfectFit) {
  const std::vector<double> x{0, 0.25, 0.5, 0.75, 1};
  const auto f = ols(x, x);
  EXPECT_DOUBLE_EQ(f.slope, 1.0);
  EXPECT_NEAR(f.intercept, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(f.r_squared, 1.0);
  EXPECT_EQ(f.p_value, 0.0);
}

TEST(Analysis, ConstantRatings) {
  const std::vector<double> x{0, 0.5, 1}, y{0.4, 0.4, 0.4};
  const auto f = ols(x, y);
  EXPECT_EQ(f.slope, 0.0);
  EXPECT_EQ(f.r_squared, 0.0);
  EXPECT_DOUBLE_EQ(f.intercept, 0.4);
  EXPECT_EQ(f.p_value, 1.0);
}

TEST(Analysis, NeedsThreeTargets) {
  const std::vector<double> x{0, 1, 0, 1}, y{0, 1, 0.1, 0.9};
  try {
    ols(x, y);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("at least 3 distinct targets"), std::string::npos);
  }
}

TEST(Analysis, FixturesMatchIndependentOracle) {
  for (const auto& fz : kFrozen) {
    SCOPED_TRACE(std::string(fz.file) + " " + fz.dim);
    const auto report = analyze(load_ratings(fixture(fz.file)));
    const auto& d = std::string(fz.dim) == "valence" ? report.valence : report.arousal;
    const auto o = reference_fit(fixture(fz.file), fz.dim);
    EXPECT_NEAR(d.fit.slope, o.slope, 1e-9);
    EXPECT_NEAR(d.fit.intercept, o.intercept, 1e-9);
    EXPECT_NEAR(d.fit.r_squared, o.r2, 1e-9);
    EXPECT_NEAR(d.fit.slope, fz.slope, 1e-9);
    EXPECT_NEAR(d.fit.intercept, fz.intercept, 1e-9);
    EXPECT_NEAR(d.fit.r_squared, fz.r2, 1e-9);
    EXPECT_NEAR(d.fit.p_value, fz.p, 1e-9);
    EXPECT_EQ(d.fit.n, 5u);
  }
}

TEST(Analysis, PointSummaries) {
  const auto t = parse(
      "participant,stimulus,target_valence,target_arousal,rated_valence,rated_arousal\n"
      "a,s1,0,0,1,1\n"
      "b,s1,0,0,3,1\n"
      "a,s2,0.5,0.5,5,5\n"
      "a,s3,1,1,9,9\n");
  const auto r = analyze(t);
  ASSERT_EQ(r.valence.points.size(), 3u);
  EXPECT_EQ(r.valence.points[0].n, 2u);
  EXPECT_DOUBLE_EQ(r.valence.points[0].mean, 0.125);
  // sd of {0, 0.25} is 0.25/sqrt(2), over sqrt(2)
  EXPECT_DOUBLE_EQ(r.valence.points[0].se, 0.125);
  EXPECT_EQ(r.valence.points[1].se, 0.0);
  EXPECT_EQ(r.rows, 4u);
}

TEST(Analysis, RowErrorsNameTheRow) {
  const std::string head = "participant,stimulus,target_valence,target_arousal,rated_valence,rated_arousal\n";
  EXPECT_NE(data_error(head + "a,s,0,0,5,5\na,s,0.5,0.5,10,5\n").find("row 3"), std::string::npos);
  EXPECT_NE(data_error(head + "a,s,0,0,0,5\n").find("outside [1, 9]"), std::string::npos);
  EXPECT_NE(data_error(head + "a,s,0,0,4.5,5\n").find("integer"), std::string::npos);
  EXPECT_NE(data_error(head + "\n\na,s,x,0,4,5\n").find("row 4"), std::string::npos);
  EXPECT_NE(data_error(head + "a,s,0,0,4\n").find("expected 6 fields"), std::string::npos);
  EXPECT_NE(data_error("participant,stimulus\n").find("missing column"), std::string::npos);
  EXPECT_NE(data_error("").find("empty"), std::string::npos);
}

TEST(Analysis, ColumnOrderIsFree) {
  const auto a = parse(
      "participant,stimulus,target_valence,target_arousal,rated_valence,rated_arousal\np,s,0.25,0.75,3,7\n");
  const auto b = parse(
      "rated_arousal,target_arousal,stimulus,rated_valence,participant,target_valence\n7,0.75,s,3,p,0.25\n");
  ASSERT_EQ(a.size(), 1u);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(a[0].target_valence, b[0].target_valence);
  EXPECT_EQ(a[0].rated_arousal, b[0].rated_arousal);
  EXPECT_EQ(a[0].participant, b[0].participant);
}

TEST(Analysis, ReportsAreBitStable) {
  const auto t = load_ratings(fixture("ratings_noisy.csv"));
  EXPECT_EQ(report_to_csv(analyze(t)), report_to_csv(analyze(t)));
  EXPECT_EQ(to_json(analyze(t)).dump(), to_json(analyze(t)).dump());
  const auto csv = report_to_csv(analyze(t));
  EXPECT_EQ(csv.rfind("dimension,n,slope,intercept,r_squared,f_statistic,p_value\n", 0), 0u);
  const auto j = to_json(analyze(t));
  EXPECT_EQ(j["valence"]["points"].size(), 5u);
}

TEST(Analysis, MissingFileIsIoError) { EXPECT_THROW(load_ratings(fixture("nope.csv")), IoError); }
