#pragma once

// Experiment execution behind the CLI: the named preset studies
// (fig2..fig7, table1, table2), the generic experiment runners, and the
// JSON run summary.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qphase/config.hpp"
#include "qphase/presets.hpp"
#include "qphase/robustness.hpp"

namespace qphase {

struct RunSummary {
  std::string command;
  std::uint64_t seed{0};
  nlohmann::json config_echo;
  double wall_time_s{0.0};
  std::vector<std::string> outputs;
};

inline void write_summary(const RunSummary& summary, const std::string& path) {
  nlohmann::json j{{"command", summary.command},
                   {"seed", summary.seed},
                   {"config", summary.config_echo},
                   {"wall_time_s", summary.wall_time_s},
                   {"outputs", summary.outputs}};
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << j.dump(2) << '\n';
}

namespace detail {

inline std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

inline void write_report(const std::vector<ReplicationStats>& rows,
                         const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_replication_csv(rows, os);
}

/// Sweep of sample sizes at fixed epsilon, all estimators, given targets.
inline std::vector<ReplicationStats> sample_size_study(
    const ContaminatedModel& model, const std::vector<int>& sizes,
    const std::vector<Target>& targets, int runs, std::uint64_t seed) {
  std::vector<ReplicationStats> rows;
  for (const auto& kind : presets::all_estimators())
    for (Target target : targets) {
      std::uint64_t block = 0;
      for (int n : sizes) {
        ScenarioConfig scenario(n, model);
        rows.push_back(
            run_replications(scenario, kind, target, runs, seed + block * runs));
        ++block;
      }
    }
  return rows;
}

}  // namespace detail

/// Runs one named preset study and writes its CSV (plus a JSON side file for
/// the breakdown sweep). Returns the written paths.
inline std::vector<std::string> run_reproduce(const std::string& figure_id,
                                              const std::string& out_dir,
                                              std::uint64_t seed,
                                              int runs_override = 0) {
  if (!known_figures.count(figure_id))
    throw std::invalid_argument("unknown figure id '" + figure_id + "'");
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> outputs;
  const std::string csv_path = detail::join_path(out_dir, figure_id + ".csv");

  auto runs_or = [&](int preset) { return runs_override > 0 ? runs_override : preset; };

  if (figure_id == "fig2" || figure_id == "fig3" || figure_id == "fig6") {
    const ContaminatedModel model = figure_id == "fig6"
                                        ? presets::distributed_outlier_model()
                                        : presets::single_outlier_model();
    const std::vector<Target> targets =
        figure_id == "fig2" ? std::vector<Target>{Target::alpha_r, Target::alpha_i}
                            : std::vector<Target>{Target::theta};
    const auto rows = detail::sample_size_study(model, presets::sample_size_sweep(),
                                                targets,
                                                runs_or(presets::replicate_runs), seed);
    detail::write_report(rows, csv_path);
    outputs.push_back(csv_path);
  } else if (figure_id == "fig5" || figure_id == "fig7" || figure_id == "table1" ||
             figure_id == "table2") {
    const ContaminatedModel model = figure_id == "fig7"
                                        ? presets::distributed_outlier_model()
                                        : presets::single_outlier_model();
    const Target target = figure_id == "table1"   ? Target::alpha_r
                          : figure_id == "table2" ? Target::alpha_i
                                                  : Target::theta;
    const auto grid = presets::default_eps_grid();
    std::vector<ReplicationStats> rows;
    const auto estimators = (figure_id == "table1" || figure_id == "table2")
                                ? std::vector<EstimatorKind>{MEstimator{PsiFamily::bisquare},
                                                             MEstimator{PsiFamily::gamma}}
                                : presets::all_estimators();
    for (const auto& kind : estimators) {
      const EpsCurve curve = epsilon_curve(grid, presets::default_n, kind,
                                           runs_or(presets::eps_curve_runs), seed,
                                           model, target);
      rows.insert(rows.end(), curve.points.begin(), curve.points.end());
    }
    detail::write_report(rows, csv_path);
    outputs.push_back(csv_path);
  } else {  // fig4
    const ContaminatedModel model = presets::single_outlier_model();
    ScenarioConfig scenario(presets::default_n, model);
    const BreakdownRule rule = BreakdownRule::for_model(model);
    std::vector<FbpResult> results;
    for (const auto& kind : presets::all_estimators())
      results.push_back(finite_breakdown_point(scenario, kind, rule,
                                               presets::fbp_step,
                                               presets::fbp_replacement, seed));
    std::ofstream os(csv_path);
    if (!os) throw std::runtime_error("cannot open for writing: " + csv_path);
    write_fbp_csv(results, os);
    outputs.push_back(csv_path);

    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : results) j.push_back(to_json(r));
    const std::string json_path = detail::join_path(out_dir, "fig4_fbp.json");
    std::ofstream js(json_path);
    js << j.dump(2) << '\n';
    outputs.push_back(json_path);
  }
  return outputs;
}

// ---------------------------------------------------------------------------
// Generic experiment runners used by the CLI subcommands.

inline std::vector<std::string> run_replicate_experiment(const ExperimentConfig& cfg,
                                                         const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  ScenarioConfig scenario(cfg.n, cfg.model());
  std::vector<ReplicationStats> rows;
  for (const auto& kind : cfg.estimator_kinds())
    rows.push_back(run_replications(scenario, kind, cfg.target, cfg.runs, cfg.base_seed));
  const std::string path = detail::join_path(out_dir, "replications.csv");
  detail::write_report(rows, path);
  return {path};
}

inline std::vector<std::string> run_eps_curve_experiment(const ExperimentConfig& cfg,
                                                         const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<ReplicationStats> rows;
  for (const auto& kind : cfg.estimator_kinds()) {
    const EpsCurve curve = epsilon_curve(cfg.eps_grid(), cfg.n, kind, cfg.runs,
                                         cfg.base_seed, cfg.model(), cfg.target);
    rows.insert(rows.end(), curve.points.begin(), curve.points.end());
  }
  const std::string path = detail::join_path(out_dir, "eps_curve.csv");
  detail::write_report(rows, path);
  return {path};
}

inline std::vector<std::string> run_fbp_experiment(const ExperimentConfig& cfg,
                                                   const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  ScenarioConfig scenario(cfg.n, cfg.model());
  const BreakdownRule rule = cfg.breakdown_rule();
  std::vector<FbpResult> results;
  for (const auto& kind : cfg.estimator_kinds())
    results.push_back(finite_breakdown_point(
        scenario, kind, rule, cfg.fbp_step,
        Replacement{cfg.replacement_mean, cfg.replacement_sd}, cfg.base_seed));

  const std::string csv_path = detail::join_path(out_dir, "fbp.csv");
  std::ofstream os(csv_path);
  if (!os) throw std::runtime_error("cannot open for writing: " + csv_path);
  write_fbp_csv(results, os);

  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : results) j.push_back(to_json(r));
  const std::string json_path = detail::join_path(out_dir, "fbp.json");
  std::ofstream js(json_path);
  js << j.dump(2) << '\n';
  return {csv_path, json_path};
}

inline std::vector<std::string> run_efficiency_experiment(const ExperimentConfig& cfg,
                                                          const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  nlohmann::json j = nlohmann::json::array();
  for (const auto& kind : cfg.estimator_kinds()) {
    const double eta = relative_efficiency(kind, cfg.n, cfg.runs, cfg.base_seed,
                                           {cfg.alpha_re, cfg.alpha_im});
    j.push_back({{"estimator", label(kind)},
                 {"n", cfg.n},
                 {"runs", cfg.runs},
                 {"efficiency", eta}});
  }
  const std::string path = detail::join_path(out_dir, "efficiency.json");
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << j.dump(2) << '\n';
  return {path};
}

}  // namespace qphase
