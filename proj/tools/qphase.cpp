// Command-line harness: scenario configuration, experiment execution, and
// CSV/JSON artifact output with deterministic seeding.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qphase/qphase.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_validation = 1;
constexpr int exit_runtime = 2;

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct CliOptions {
  std::string config_path;
  std::string out_dir = ".";
  bool out_given = false;
  long long seed = -1;
  int runs = 0;
};

// Seed priority: --seed flag, then config base_seed, then ROBUST_QPHASE_SEED,
// then the built-in default.
std::uint64_t resolve_seed(const CliOptions& opts, const qphase::ExperimentConfig& cfg) {
  if (opts.seed >= 0) return static_cast<std::uint64_t>(opts.seed);
  if (cfg.seed_given) return cfg.base_seed;
  if (const char* env = std::getenv("ROBUST_QPHASE_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return v;
  }
  return qphase::presets::default_seed;
}

int default_runs(qphase::Experiment experiment) {
  switch (experiment) {
    case qphase::Experiment::eps_curve: return qphase::presets::eps_curve_runs;
    case qphase::Experiment::efficiency: return qphase::presets::efficiency_runs;
    default: return qphase::presets::replicate_runs;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust amplitude and phase estimation from simulated homodyne "
               "measurements contaminated by outlier Gaussian states"};
  app.require_subcommand(1);

  CliOptions opts;
  app.add_option("--config", opts.config_path, "experiment configuration file");
  app.add_option("--seed", opts.seed, "base seed (overrides config)");
  auto* out_opt = app.add_option("--out", opts.out_dir, "output directory");
  app.add_option("--runs", opts.runs, "replication count (overrides config)");

  auto* simulate = app.add_subcommand("simulate", "generate a dataset CSV");
  auto* estimate = app.add_subcommand("estimate", "estimate amplitude/phase from a dataset CSV");
  std::string data_path;
  estimate->add_option("--data", data_path, "dataset CSV to estimate from")->required();
  auto* eps_curve = app.add_subcommand("eps-curve", "estimator value vs contamination strength");
  auto* fbp = app.add_subcommand("fbp", "finite breakdown point by data replacement");
  auto* efficiency = app.add_subcommand("efficiency", "Monte Carlo relative efficiency");
  auto* replicate = app.add_subcommand("replicate", "replication bias/MSE study");
  auto* reproduce = app.add_subcommand("reproduce", "run a named preset study");
  std::string figure_id;
  reproduce->add_option("id", figure_id, "preset id (fig2..fig7, table1, table2)");

  CLI11_PARSE(app, argc, argv);
  opts.out_given = out_opt->count() > 0;

  qphase::ExperimentConfig cfg;
  if (!opts.config_path.empty()) {
    std::string text;
    try {
      text = slurp(opts.config_path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return exit_validation;
    }
    const qphase::ConfigParseResult parsed = qphase::parse_config(text);
    if (!parsed.ok()) {
      for (const auto& err : parsed.errors) std::cerr << "config error: " << err << '\n';
      return exit_validation;
    }
    cfg = *parsed.config;
  }

  cfg.base_seed = resolve_seed(opts, cfg);
  if (opts.runs > 0) {
    cfg.runs = opts.runs;
    cfg.runs_given = true;
  }
  const std::string out_dir = opts.out_given ? opts.out_dir : cfg.output_path;

  const auto t0 = std::chrono::steady_clock::now();
  qphase::RunSummary summary;
  summary.seed = cfg.base_seed;
  summary.config_echo = {{"n", cfg.n},
                         {"epsilon", cfg.epsilon},
                         {"alpha_re", cfg.alpha_re},
                         {"alpha_im", cfg.alpha_im},
                         {"outlier", cfg.outlier},
                         {"estimators", cfg.estimators},
                         {"runs", cfg.runs},
                         {"target", qphase::target_name(cfg.target)}};

  try {
    if (*simulate) {
      summary.command = "simulate";
      std::filesystem::create_directories(out_dir);
      const qphase::Dataset data =
          qphase::generate_dataset(qphase::ScenarioConfig(cfg.n, cfg.model()), cfg.base_seed);
      const std::string path = (std::filesystem::path(out_dir) / "dataset.csv").string();
      qphase::write_dataset_csv(data, path);
      summary.outputs.push_back(path);
    } else if (*estimate) {
      summary.command = "estimate";
      std::filesystem::create_directories(out_dir);
      const qphase::Dataset data = qphase::read_dataset_csv(data_path);
      nlohmann::json results = nlohmann::json::array();
      for (const auto& kind : cfg.estimator_kinds()) {
        const qphase::AmplitudeEstimate est = qphase::estimate_amplitude(data, kind);
        nlohmann::json j{{"estimator", qphase::label(kind)},
                         {"alpha_r", qphase::to_json(est.alpha_r)},
                         {"alpha_i", qphase::to_json(est.alpha_i)}};
        if (est.alpha_r.value != 0.0)
          j["theta"] = qphase::phase_from_amplitude(est.alpha_r.value, est.alpha_i.value);
        results.push_back(std::move(j));
      }
      const std::string path = (std::filesystem::path(out_dir) / "estimates.json").string();
      std::ofstream os(path);
      os << results.dump(2) << '\n';
      summary.outputs.push_back(path);
    } else if (*eps_curve) {
      summary.command = "eps-curve";
      if (!cfg.runs_given) cfg.runs = default_runs(qphase::Experiment::eps_curve);
      summary.outputs = qphase::run_eps_curve_experiment(cfg, out_dir);
    } else if (*fbp) {
      summary.command = "fbp";
      summary.outputs = qphase::run_fbp_experiment(cfg, out_dir);
    } else if (*efficiency) {
      summary.command = "efficiency";
      if (!cfg.runs_given) cfg.runs = default_runs(qphase::Experiment::efficiency);
      summary.outputs = qphase::run_efficiency_experiment(cfg, out_dir);
    } else if (*replicate) {
      summary.command = "replicate";
      summary.outputs = qphase::run_replicate_experiment(cfg, out_dir);
    } else if (*reproduce) {
      summary.command = "reproduce";
      if (figure_id.empty()) figure_id = cfg.figure;
      if (figure_id.empty()) {
        std::cerr << "error: reproduce needs a preset id (argument or config key 'figure')\n";
        return exit_validation;
      }
      if (!qphase::known_figures.count(figure_id)) {
        std::cerr << "error: unknown preset id '" << figure_id << "'\n";
        return exit_validation;
      }
      summary.command += " " + figure_id;
      const int runs_override = cfg.runs_given ? cfg.runs : 0;
      summary.outputs =
          qphase::run_reproduce(figure_id, out_dir, cfg.base_seed, runs_override);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_validation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_runtime;
  }

  summary.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  try {
    std::filesystem::create_directories(out_dir);
    const std::string path =
        (std::filesystem::path(out_dir) / "run_summary.json").string();
    qphase::write_summary(summary, path);
    for (const auto& file : summary.outputs) std::cout << file << '\n';
    std::cout << path << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_runtime;
  }
  return exit_ok;
}
