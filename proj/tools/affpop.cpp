// affpop: command-line front end (generate, batch, validate, dump-config, analyze).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "affpop/affpop.hpp"

namespace {

enum Exit : int { kOk = 0, kUsage = 2, kData = 3, kIo = 4 };

struct Common {
  std::string config;
};

affpop::EngineConfig load(const Common& c) {
  return c.config.empty() ? affpop::default_config() : affpop::load_config(c.config);
}

double clamped(const char* flag, double v) {
  const double c = affpop::clamp_unit(v);
  if (c != v) std::cerr << "warning: " << flag << ' ' << v << " clamped to " << c << '\n';
  return c;
}

struct GenerateArgs {
  Common common;
  double valence = 0.5;
  double arousal = 0.5;
  std::string trajectory;
  int bars = 8;
  std::uint64_t seed = 0;
  std::string out;
  std::string wire;
};

int cmd_generate(const GenerateArgs& a) {
  const auto cfg = std::make_shared<const affpop::EngineConfig>(load(a.common));
  affpop::ExcerptSpec spec;
  spec.bars = a.bars;
  spec.seed = a.seed;
  spec.trajectory = a.trajectory.empty()
                        ? affpop::EmotionTrajectory::constant(
                              affpop::EmotionPoint(clamped("--valence", a.valence), clamped("--arousal", a.arousal)))
                        : affpop::load_trajectory(a.trajectory);
  const auto ex = affpop::generate_excerpt(*cfg, spec);
  affpop::save_smf(a.out, ex.stream);

  if (!a.wire.empty()) {
    affpop::RealtimeEngine rt(cfg, spec);
    std::ofstream w(a.wire);
    if (!w) throw affpop::IoError("cannot write " + a.wire);
    while (!rt.finished()) affpop::write_ndjson(w, rt.step(60.0));
    if (!w) throw affpop::IoError("cannot write " + a.wire);
  }

  std::printf("wrote %s: %d bars, seed %llu, %.2f s\n", a.out.c_str(), ex.bars,
              static_cast<unsigned long long>(ex.seed), ex.duration_seconds());
  return kOk;
}

struct BatchArgs {
  Common common;
  std::uint64_t seed = 0;
  std::string out;
  unsigned jobs = 0;
};

int cmd_batch(const BatchArgs& a) {
  const auto cfg = load(a.common);
  const auto entries = affpop::write_stimulus_batch(a.out, a.seed, cfg, a.jobs);
  std::printf("wrote %zu stimuli and manifest.csv to %s (mean duration %.2f s)\n", entries.size(), a.out.c_str(),
              affpop::mean_duration(entries));
  return kOk;
}

int cmd_validate(const Common& c) {
  std::vector<std::string> problems;
  try {
    const auto cfg = c.config.empty() ? affpop::default_config()
                                      : affpop::config_from_json(nlohmann::json::parse(std::ifstream(c.config)));
    problems = cfg.violations();
  } catch (const affpop::ConfigError& e) {
    problems = e.violations();
  }
  const auto grid = affpop::StimulusGrid().violations();
  problems.insert(problems.end(), grid.begin(), grid.end());
  if (problems.empty()) {
    std::printf("%s: ok\n", c.config.empty() ? "built-in config" : c.config.c_str());
    return kOk;
  }
  for (const auto& p : problems) std::fprintf(stderr, "invalid: %s\n", p.c_str());
  return kData;
}

int cmd_dump_config(const Common& c, const std::string& out) {
  const std::string text = affpop::to_json(load(c)).dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
    return kOk;
  }
  std::ofstream f(out);
  f << text;
  if (!f) throw affpop::IoError("cannot write " + out);
  return kOk;
}

void print_text(const affpop::AnalysisReport& r) {
  std::printf("%zu ratings\n", r.rows);
  for (const auto* d : {&r.valence, &r.arousal}) {
    const auto& f = d->fit;
    std::printf("\n%s: slope %.4f  intercept %.4f  R^2 %.4f  F %.4g  p %.4g  (%zu targets)\n", d->dimension.c_str(),
                f.slope, f.intercept, f.r_squared, f.f_statistic, f.p_value, f.n);
    std::printf("  %8s %5s %8s %8s\n", "target", "n", "mean", "se");
    for (const auto& p : d->points) std::printf("  %8.4f %5zu %8.4f %8.4f\n", p.target, p.n, p.mean, p.se);
  }
}

int cmd_analyze(const std::string& path, const std::string& format) {
  const auto report = affpop::analyze(affpop::load_ratings(path));
  if (format == "json") std::cout << affpop::to_json(report).dump(2) << '\n';
  else if (format == "csv") std::cout << affpop::report_to_csv(report);
  else print_text(report);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Affective retro-pop MIDI generator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", affpop::kVersion);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Render one excerpt to a Standard MIDI File");
  auto* v_opt = g->add_option("--valence", gen.valence, "Valence in [0, 1]");
  auto* a_opt = g->add_option("--arousal", gen.arousal, "Arousal in [0, 1]");
  g->add_option("--trajectory", gen.trajectory, "Trajectory JSON file (per-bar keyframes)")
      ->check(CLI::ExistingFile)
      ->excludes(v_opt)
      ->excludes(a_opt);
  g->add_option("--bars", gen.bars, "Excerpt length")->check(CLI::IsMember({4, 8, 16, 32}));
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("--out", gen.out, "Output .mid path")->required();
  g->add_option("--wire", gen.wire, "Also write the streamed frames as NDJSON");
  g->add_option("--config", gen.common.config, "Engine config JSON")->check(CLI::ExistingFile);

  BatchArgs batch;
  auto* b = app.add_subcommand("batch", "Render the 39-excerpt stimulus set with a manifest");
  b->add_option("--seed", batch.seed, "Base seed (replicates use seed, seed+1, seed+2)");
  b->add_option("--out", batch.out, "Output directory")->required();
  b->add_option("--jobs", batch.jobs, "Worker threads (0 = all cores)");
  b->add_option("--config", batch.common.config, "Engine config JSON")->check(CLI::ExistingFile);

  Common val;
  auto* v = app.add_subcommand("validate", "Check an engine config and the stimulus grid");
  v->add_option("--config", val.config, "Engine config JSON")->check(CLI::ExistingFile);

  Common dump;
  std::string dump_out;
  auto* d = app.add_subcommand("dump-config", "Print the engine config as JSON");
  d->add_option("--config", dump.config, "Engine config JSON")->check(CLI::ExistingFile);
  d->add_option("--out", dump_out, "Output path (default stdout)");

  std::string ratings, format = "text";
  auto* an = app.add_subcommand("analyze", "Regress listener ratings on target emotion");
  an->add_option("ratings", ratings, "Ratings CSV")->required();
  an->add_option("--format", format, "text, json or csv")->check(CLI::IsMember({"text", "json", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*g) return cmd_generate(gen);
    if (*b) return cmd_batch(batch);
    if (*v) return cmd_validate(val);
    if (*d) return cmd_dump_config(dump, dump_out);
    if (*an) return cmd_analyze(ratings, format);
  } catch (const affpop::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
