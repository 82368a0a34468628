#pragma once

// Flat key-value experiment configuration: parsing, validation (all errors
// reported, not just the first), and defaults.

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qphase/estimators.hpp"
#include "qphase/presets.hpp"
#include "qphase/robustness.hpp"

namespace qphase {

enum class Experiment { replicate, eps_curve, fbp, efficiency, reproduce };

inline const std::set<std::string> known_figures = {
    "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "table1", "table2"};

struct ExperimentConfig {
  Experiment experiment{Experiment::replicate};
  std::string figure;  // set when experiment == reproduce

  // Scenario
  int n{presets::default_n};
  double epsilon{presets::default_epsilon};
  double alpha_re{10.0};
  double alpha_im{4.0};
  std::string outlier{"single"};  // single | distributed
  double z0_re{15.0};
  double z0_im{15.0};
  double kappa0{0.1};
  double mu1{0.1};
  double sigma1{0.1};
  double mu2{0.1};
  double sigma2{0.1};

  std::vector<std::string> estimators{"mean", "median", "bisquare", "gamma"};
  Target target{Target::theta};
  int runs{presets::replicate_runs};
  bool runs_given{false};
  std::uint64_t base_seed{presets::default_seed};
  bool seed_given{false};
  std::string output_path{"."};

  // Protocol knobs
  double eps_start{0.0};
  double eps_stop{0.35};
  double eps_step{0.025};
  int fbp_step{presets::fbp_step};
  double replacement_mean{presets::fbp_replacement.mean};
  double replacement_sd{presets::fbp_replacement.sd};
  double theta_tol{BreakdownRule{}.theta_tol};
  std::optional<double> magnitude_bound;  // default 100 * |alpha|

  double gamma_exponent{0.5};
  double bisquare_c_factor{4.68};

  ContaminatedModel model() const {
    if (outlier == "distributed")
      return ContaminatedModel({alpha_re, alpha_im}, epsilon,
                               DistributedOutlier{mu1, sigma1, mu2, sigma2, kappa0});
    return ContaminatedModel({alpha_re, alpha_im}, epsilon,
                             SingleOutlier{{z0_re, z0_im}, kappa0});
  }

  std::vector<EstimatorKind> estimator_kinds() const {
    std::vector<EstimatorKind> kinds;
    for (const auto& name : estimators) {
      if (name == "mean") kinds.emplace_back(MeanEstimator{});
      else if (name == "median") kinds.emplace_back(MedianEstimator{});
      else {
        MEstimator m;
        if (name == "bisquare") m.family = PsiFamily::bisquare;
        else if (name == "gamma") m.family = PsiFamily::gamma;
        else m.family = PsiFamily::mle_normal;  // "mle"
        m.tuning.gamma_exponent = gamma_exponent;
        m.tuning.bisquare_c_factor = bisquare_c_factor;
        kinds.push_back(m);
      }
    }
    return kinds;
  }

  BreakdownRule breakdown_rule() const {
    BreakdownRule rule = BreakdownRule::for_model(model());
    rule.theta_tol = theta_tol;
    if (magnitude_bound) rule.magnitude_bound = *magnitude_bound;
    return rule;
  }

  std::vector<double> eps_grid() const {
    std::vector<double> grid;
    for (int i = 0;; ++i) {
      const double eps = eps_start + i * eps_step;
      if (eps > eps_stop + 1e-12) break;
      grid.push_back(eps);
    }
    return grid;
  }
};

struct ConfigParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;

  bool ok() const { return errors.empty() && config.has_value(); }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline bool parse_double(const std::string& s, double& out) {
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && !s.empty();
}

inline bool parse_int(const std::string& s, long long& out) {
  char* end = nullptr;
  out = std::strtoll(s.c_str(), &end, 10);
  return end == s.c_str() + s.size() && !s.empty();
}

}  // namespace detail

/// Parses `key = value` lines ('#' starts a comment). Unknown keys, malformed
/// values and out-of-range settings are all collected; the config is returned
/// only when no error was found.
inline ConfigParseResult parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::vector<std::string> errors;

  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  bool experiment_set = false;

  auto err = [&](const std::string& msg) {
    errors.push_back("line " + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      err("expected 'key = value', got '" + line + "'");
      continue;
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      err("empty key or value");
      continue;
    }

    auto want_double = [&](double& slot) {
      double v;
      if (detail::parse_double(value, v)) slot = v;
      else err("key '" + key + "': not a number: '" + value + "'");
    };
    auto want_int = [&](int& slot) {
      long long v;
      if (detail::parse_int(value, v)) slot = static_cast<int>(v);
      else err("key '" + key + "': not an integer: '" + value + "'");
    };

    if (key == "experiment") {
      experiment_set = true;
      if (value == "replicate") cfg.experiment = Experiment::replicate;
      else if (value == "eps-curve") cfg.experiment = Experiment::eps_curve;
      else if (value == "fbp") cfg.experiment = Experiment::fbp;
      else if (value == "efficiency") cfg.experiment = Experiment::efficiency;
      else if (value == "reproduce") cfg.experiment = Experiment::reproduce;
      else err("key 'experiment': unknown value '" + value + "'");
    } else if (key == "figure") {
      if (known_figures.count(value)) cfg.figure = value;
      else err("key 'figure': unknown figure id '" + value + "'");
    } else if (key == "n") want_int(cfg.n);
    else if (key == "epsilon") want_double(cfg.epsilon);
    else if (key == "alpha_re") want_double(cfg.alpha_re);
    else if (key == "alpha_im") want_double(cfg.alpha_im);
    else if (key == "outlier") {
      if (value == "single" || value == "distributed") cfg.outlier = value;
      else err("key 'outlier': expected 'single' or 'distributed'");
    } else if (key == "z0_re") want_double(cfg.z0_re);
    else if (key == "z0_im") want_double(cfg.z0_im);
    else if (key == "kappa0") want_double(cfg.kappa0);
    else if (key == "mu1") want_double(cfg.mu1);
    else if (key == "sigma1") want_double(cfg.sigma1);
    else if (key == "mu2") want_double(cfg.mu2);
    else if (key == "sigma2") want_double(cfg.sigma2);
    else if (key == "estimators") {
      std::vector<std::string> names;
      std::istringstream ss(value);
      std::string item;
      bool ok = true;
      while (std::getline(ss, item, ',')) {
        item = detail::trim(item);
        if (item == "mean" || item == "median" || item == "bisquare" ||
            item == "gamma" || item == "mle") {
          names.push_back(item);
        } else {
          err("key 'estimators': unknown estimator name '" + item + "'");
          ok = false;
        }
      }
      if (ok && names.empty()) err("key 'estimators': empty list");
      if (ok && !names.empty()) cfg.estimators = std::move(names);
    } else if (key == "target") {
      if (value == "theta" || value == "alpha_r" || value == "alpha_i")
        cfg.target = target_from_name(value);
      else err("key 'target': expected theta, alpha_r or alpha_i");
    } else if (key == "runs") {
      want_int(cfg.runs);
      cfg.runs_given = true;
    } else if (key == "base_seed") {
      long long v;
      if (detail::parse_int(value, v) && v >= 0) {
        cfg.base_seed = static_cast<std::uint64_t>(v);
        cfg.seed_given = true;
      } else err("key 'base_seed': not a nonnegative integer");
    } else if (key == "out") cfg.output_path = value;
    else if (key == "eps_start") want_double(cfg.eps_start);
    else if (key == "eps_stop") want_double(cfg.eps_stop);
    else if (key == "eps_step") want_double(cfg.eps_step);
    else if (key == "fbp_step") want_int(cfg.fbp_step);
    else if (key == "replacement_mean") want_double(cfg.replacement_mean);
    else if (key == "replacement_sd") want_double(cfg.replacement_sd);
    else if (key == "theta_tol") want_double(cfg.theta_tol);
    else if (key == "magnitude_bound") {
      double v;
      if (detail::parse_double(value, v)) cfg.magnitude_bound = v;
      else err("key 'magnitude_bound': not a number");
    } else if (key == "gamma_exponent") want_double(cfg.gamma_exponent);
    else if (key == "bisquare_c_factor") want_double(cfg.bisquare_c_factor);
    else err("unknown key '" + key + "'");
  }

  // Range validation; keep going so every problem is reported at once.
  lineno = 0;
  if (!(cfg.epsilon >= 0.0 && cfg.epsilon < 1.0))
    errors.push_back("key 'epsilon': value " + std::to_string(cfg.epsilon) +
                     " out of range [0,1)");
  if (cfg.n < 1) errors.push_back("key 'n': must be >= 1");
  if (cfg.runs < 1) errors.push_back("key 'runs': must be >= 1");
  if (!(cfg.sigma1 > 0.0)) errors.push_back("key 'sigma1': must be > 0");
  if (!(cfg.sigma2 > 0.0)) errors.push_back("key 'sigma2': must be > 0");
  if (!(cfg.kappa0 >= 0.0)) errors.push_back("key 'kappa0': must be >= 0");
  if (cfg.fbp_step < 1) errors.push_back("key 'fbp_step': must be >= 1");
  if (!(cfg.replacement_sd > 0.0))
    errors.push_back("key 'replacement_sd': must be > 0");
  if (!(cfg.theta_tol > 0.0)) errors.push_back("key 'theta_tol': must be > 0");
  if (!(cfg.eps_step > 0.0)) errors.push_back("key 'eps_step': must be > 0");
  if (!(cfg.gamma_exponent > 0.0))
    errors.push_back("key 'gamma_exponent': must be > 0");
  if (!(cfg.bisquare_c_factor > 0.0))
    errors.push_back("key 'bisquare_c_factor': must be > 0");
  if (cfg.experiment == Experiment::reproduce && cfg.figure.empty())
    errors.push_back("experiment 'reproduce' requires key 'figure'");
  if (!experiment_set && cfg.experiment == Experiment::replicate) {
    // 'experiment' defaults to replicate; accept configs that omit it.
  }

  ConfigParseResult result;
  result.errors = std::move(errors);
  if (result.errors.empty()) result.config = std::move(cfg);
  return result;
}

}  // namespace qphase
