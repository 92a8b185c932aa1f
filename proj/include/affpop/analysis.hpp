#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/fisher_f.hpp>
#include <nlohmann/json.hpp>

#include "affpop/error.hpp"

namespace affpop {

inline constexpr int kRatingMin = 1;
inline constexpr int kRatingMax = 9;

/// Maps a 1..9 self-report onto [0, 1].
inline double normalize_rating(int raw) {
  if (raw < kRatingMin || raw > kRatingMax)
    throw DataError("rating " + std::to_string(raw) + " outside [1, 9]");
  return static_cast<double>(raw - kRatingMin) / (kRatingMax - kRatingMin);
}

inline double denormalize_rating(double normalized) {
  return kRatingMin + normalized * (kRatingMax - kRatingMin);
}

struct RatingRow {
  std::string participant;
  std::string stimulus;
  double target_valence = 0;
  double target_arousal = 0;
  int rated_valence = 5;
  int rated_arousal = 5;
};

using RatingsTable = std::vector<RatingRow>;

namespace analysis_detail {

inline std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && ws(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && ws(s[i])) ++i;
  return s.substr(i);
}

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_double(const std::string& s, const std::string& where) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
    throw DataError(where + ": not a number: '" + s + "'");
  return v;
}

inline int parse_rating(const std::string& s, const std::string& where) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw DataError(where + ": rating must be an integer, got '" + s + "'");
  if (v < kRatingMin || v > kRatingMax)
    throw DataError(where + ": rating " + std::to_string(v) + " outside [1, 9]");
  return v;
}

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace analysis_detail

inline const std::vector<std::string>& ratings_columns() {
  static const std::vector<std::string> cols{"participant",    "stimulus",      "target_valence",
                                             "target_arousal", "rated_valence", "rated_arousal"};
  return cols;
}

/// Header row required; columns may appear in any order. Blank lines are skipped.
inline RatingsTable read_ratings_csv(std::istream& in) {
  using namespace analysis_detail;
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++lineno;
    if (!trim(line).empty()) header = split(line);
  }
  if (header.empty()) throw DataError("ratings: empty file");
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const auto& name : ratings_columns())
    if (!col.contains(name)) throw DataError("ratings: missing column '" + name + "'");

  RatingsTable rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split(line);
    const std::string where = "row " + std::to_string(lineno);
    if (cells.size() != header.size())
      throw DataError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                      std::to_string(cells.size()));
    RatingRow r;
    r.participant = cells[col["participant"]];
    r.stimulus = cells[col["stimulus"]];
    r.target_valence = parse_double(cells[col["target_valence"]], where);
    r.target_arousal = parse_double(cells[col["target_arousal"]], where);
    r.rated_valence = parse_rating(cells[col["rated_valence"]], where);
    r.rated_arousal = parse_rating(cells[col["rated_arousal"]], where);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline RatingsTable load_ratings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ratings file " + path.string());
  return read_ratings_csv(in);
}

struct LinearFit {
  std::size_t n = 0;
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
  double f_statistic = 0;
  double p_value = 1;
};

/// Ordinary least squares of y on x with an F test on the slope.
inline LinearFit ols(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("ols: x and y differ in length");
  std::vector<double> distinct(x.begin(), x.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3)
    throw DataError("analysis needs at least 3 distinct targets, got " + std::to_string(distinct.size()));

  const auto n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }

  LinearFit f;
  f.n = x.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += e * e;
  }
  const double df = n - 2;
  if (syy == 0) {
    f.slope = 0;
    f.intercept = my;
    f.r_squared = 0;
    f.f_statistic = 0;
    f.p_value = 1;
    return f;
  }
  f.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  const double ss_reg = syy - ss_res;
  if (ss_res <= std::numeric_limits<double>::epsilon() * syy) {
    f.f_statistic = std::numeric_limits<double>::infinity();
    f.p_value = 0;
    return f;
  }
  f.f_statistic = ss_reg / (ss_res / df);
  boost::math::fisher_f_distribution<double> dist(1.0, df);
  f.p_value = boost::math::cdf(boost::math::complement(dist, f.f_statistic));
  return f;
}

struct PointSummary {
  double target = 0;
  std::size_t n = 0;
  double mean = 0;
  double se = 0;  // sample standard deviation / sqrt(n); 0 when n == 1
};

struct DimensionReport {
  std::string dimension;
  std::vector<PointSummary> points;
  LinearFit fit;
};

struct AnalysisReport {
  std::size_t rows = 0;
  DimensionReport valence;
  DimensionReport arousal;
};

namespace analysis_detail {

inline PointSummary summarize(double target, const std::vector<double>& v) {
  PointSummary s;
  s.target = target;
  s.n = v.size();
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.se = std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
  }
  return s;
}

template <class Target, class Rated>
DimensionReport dimension(const RatingsTable& t, std::string name, Target target, Rated rated) {
  std::map<double, std::vector<double>> groups;
  for (const auto& r : t) groups[target(r)].push_back(normalize_rating(rated(r)));
  DimensionReport d;
  d.dimension = std::move(name);
  std::vector<double> xs, ys;
  for (const auto& [x, v] : groups) {
    d.points.push_back(summarize(x, v));
    xs.push_back(x);
    ys.push_back(d.points.back().mean);
  }
  d.fit = ols(xs, ys);
  return d;
}

}  // namespace analysis_detail

/// Regresses the per-target mean normalized rating on the target, per dimension.
inline AnalysisReport analyze(const RatingsTable& table) {
  if (table.empty()) throw DataError("ratings table is empty");
  AnalysisReport r;
  r.rows = table.size();
  r.valence = analysis_detail::dimension(
      table, "valence", [](const RatingRow& x) { return x.target_valence; },
      [](const RatingRow& x) { return x.rated_valence; });
  r.arousal = analysis_detail::dimension(
      table, "arousal", [](const RatingRow& x) { return x.target_arousal; },
      [](const RatingRow& x) { return x.rated_arousal; });
  return r;
}

inline nlohmann::json to_json(const LinearFit& f) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  return {{"n", f.n},
          {"slope", f.slope},
          {"intercept", f.intercept},
          {"r_squared", f.r_squared},
          {"f_statistic", num(f.f_statistic)},
          {"p_value", f.p_value}};
}

inline nlohmann::json to_json(const AnalysisReport& r) {
  auto dim = [](const DimensionReport& d) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : d.points) pts.push_back({{"target", p.target}, {"n", p.n}, {"mean", p.mean}, {"se", p.se}});
    return nlohmann::json{{"fit", to_json(d.fit)}, {"points", pts}};
  };
  return {{"rows", r.rows}, {"valence", dim(r.valence)}, {"arousal", dim(r.arousal)}};
}

/// Two tables: one fit line per dimension, then the per-point mean and SE rows.
inline std::string report_to_csv(const AnalysisReport& r) {
  using analysis_detail::fmt;
  std::ostringstream out;
  out << "dimension,n,slope,intercept,r_squared,f_statistic,p_value\n";
  for (const auto* d : {&r.valence, &r.arousal})
    out << d->dimension << ',' << d->fit.n << ',' << fmt(d->fit.slope) << ',' << fmt(d->fit.intercept) << ','
        << fmt(d->fit.r_squared) << ',' << fmt(d->fit.f_statistic) << ',' << fmt(d->fit.p_value) << '\n';
  out << "\ndimension,target,n,mean,se\n";
  for (const auto* d : {&r.valence, &r.arousal})
    for (const auto& p : d->points)
      out << d->dimension << ',' << fmt(p.target) << ',' << p.n << ',' << fmt(p.mean) << ',' << fmt(p.se) << '\n';
  return out.str();
}

}  // namespace affpop
