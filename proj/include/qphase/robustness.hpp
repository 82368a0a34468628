#pragma once

// Robustness protocols: replication bias/MSE studies, the eps-curve, the
// finite breakdown point by data replacement, and Monte Carlo relative
// efficiency. Report rows serialize to CSV and JSON.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qphase/estimators.hpp"
#include "qphase/gaussian_model.hpp"
#include "qphase/sampling.hpp"

namespace qphase {

enum class Target { alpha_r, alpha_i, theta };

inline std::string target_name(Target t) {
  switch (t) {
    case Target::alpha_r: return "alpha_r";
    case Target::alpha_i: return "alpha_i";
    case Target::theta: return "theta";
  }
  return "unknown";
}

inline Target target_from_name(const std::string& s) {
  if (s == "alpha_r") return Target::alpha_r;
  if (s == "alpha_i") return Target::alpha_i;
  if (s == "theta") return Target::theta;
  throw std::invalid_argument("unknown target '" + s + "'");
}

/// True value of the target under a scenario's model.
inline double true_value(const ContaminatedModel& model, Target target) {
  switch (target) {
    case Target::alpha_r: return model.alpha.re;
    case Target::alpha_i: return model.alpha.im;
    case Target::theta:
      return phase_from_amplitude(model.alpha.re, model.alpha.im);
  }
  throw std::logic_error("true_value: unreachable");
}

struct ReplicationStats {
  std::string estimator;
  Target target{Target::theta};
  int n{0};
  double epsilon{0.0};
  int runs{0};
  double mean_estimate{0.0};
  double bias{0.0};
  double mse{0.0};
  double sd{0.0};
  double mean_iterations{0.0};
};

/// Runs `runs` replications, one dataset per seed base_seed + r, and reduces
/// them to mean estimate, bias and MSE against the scenario truth, the sample
/// sd of the estimates, and the mean iteration count. For the theta target
/// the iteration count averages the two amplitude solves.
inline ReplicationStats run_replications(const ScenarioConfig& scenario,
                                         const EstimatorKind& kind, Target target,
                                         int runs, std::uint64_t base_seed) {
  if (runs < 1) throw std::invalid_argument("run_replications: runs must be >= 1");
  const double truth = true_value(scenario.model, target);

  double sum = 0.0, sumsq = 0.0, iter_sum = 0.0;
  for (int r = 0; r < runs; ++r) {
    const Dataset data = generate_dataset(scenario, base_seed + static_cast<std::uint64_t>(r));
    const AmplitudeEstimate est = estimate_amplitude(data, kind);
    double value = 0.0;
    double iters = 0.0;
    switch (target) {
      case Target::alpha_r:
        value = est.alpha_r.value;
        iters = est.alpha_r.iterations;
        break;
      case Target::alpha_i:
        value = est.alpha_i.value;
        iters = est.alpha_i.iterations;
        break;
      case Target::theta:
        value = phase_from_amplitude(est.alpha_r.value, est.alpha_i.value);
        iters = 0.5 * (est.alpha_r.iterations + est.alpha_i.iterations);
        break;
    }
    sum += value;
    sumsq += value * value;
    iter_sum += iters;
  }

  ReplicationStats stats;
  stats.estimator = label(kind);
  stats.target = target;
  stats.n = scenario.n;
  stats.epsilon = scenario.model.epsilon;
  stats.runs = runs;
  stats.mean_estimate = sum / runs;
  stats.bias = stats.mean_estimate - truth;
  stats.mse = sumsq / runs - 2.0 * truth * stats.mean_estimate + truth * truth;
  const double var = std::max(0.0, sumsq / runs - stats.mean_estimate * stats.mean_estimate);
  stats.sd = runs > 1 ? std::sqrt(var * runs / (runs - 1.0)) : 0.0;
  stats.mean_iterations = iter_sum / runs;
  return stats;
}

struct EpsCurve {
  std::string estimator;
  Target target{Target::theta};
  int n{0};
  std::vector<ReplicationStats> points;
};

/// One replication study per epsilon on a strictly increasing grid, holding
/// the rest of the scenario fixed. Point j uses seeds base_seed + j*runs + r,
/// so curves are reproducible point by point.
inline EpsCurve epsilon_curve(const std::vector<double>& eps_grid, int n,
                              const EstimatorKind& kind, int runs,
                              std::uint64_t base_seed,
                              const ContaminatedModel& scenario_template,
                              Target target = Target::theta) {
  for (std::size_t j = 0; j < eps_grid.size(); ++j) {
    if (!(eps_grid[j] >= 0.0 && eps_grid[j] < 1.0))
      throw std::invalid_argument("epsilon_curve: grid values must be in [0,1)");
    if (j > 0 && !(eps_grid[j] > eps_grid[j - 1]))
      throw std::invalid_argument("epsilon_curve: grid must be strictly increasing");
  }
  EpsCurve curve;
  curve.estimator = label(kind);
  curve.target = target;
  curve.n = n;
  curve.points.reserve(eps_grid.size());
  for (std::size_t j = 0; j < eps_grid.size(); ++j) {
    ContaminatedModel model(scenario_template.alpha, eps_grid[j],
                            scenario_template.outliers);
    ScenarioConfig scenario(n, model);
    curve.points.push_back(run_replications(
        scenario, kind, target, runs,
        base_seed + static_cast<std::uint64_t>(j) * static_cast<std::uint64_t>(runs)));
  }
  return curve;
}

// ---------------------------------------------------------------------------
// Finite breakdown point

/// Fires when theta-hat lands within theta_tol of theta_target (the value an
/// estimator returns once both amplitude estimates sit in the replacement
/// cloud), or when either amplitude estimate leaves [-bound, bound].
struct BreakdownRule {
  double theta_target{std::atan(1.0)};
  double theta_tol{0.006};
  double magnitude_bound{0.0};

  static BreakdownRule for_model(const ContaminatedModel& model) {
    BreakdownRule rule;
    rule.magnitude_bound = 100.0 * model.alpha.abs();
    return rule;
  }

  bool fires(double theta_hat, double alpha_r, double alpha_i) const {
    if (std::abs(theta_hat - theta_target) <= theta_tol) return true;
    return std::abs(alpha_r) > magnitude_bound || std::abs(alpha_i) > magnitude_bound;
  }
};

struct FbpSweepPoint {
  int m{0};
  double theta{0.0};
  double alpha_r{0.0};
  double alpha_i{0.0};
  bool fired{false};
};

struct FbpResult {
  std::string estimator;
  int n{0};
  int step{0};
  int m_star{0};
  double fbp{0.0};
  BreakdownRule detection;
  bool no_breakdown{false};
  std::vector<FbpSweepPoint> sweep;
};

struct Replacement {
  double mean{1000.0};
  double sd{0.1};
};

/// Sweeps m = 0, step, 2*step, ... replacing m records of one base dataset
/// with draws from the replacement law, and stops at the first m where the
/// rule fires; m* is the last pre-breakdown m. If the rule never fires up to
/// m = n, returns m* = n flagged no-breakdown.
inline FbpResult finite_breakdown_point(const ScenarioConfig& scenario,
                                        const EstimatorKind& kind,
                                        const BreakdownRule& rule, int step,
                                        Replacement replacement,
                                        std::uint64_t seed) {
  if (step < 1) throw std::invalid_argument("finite_breakdown_point: step must be >= 1");
  const Dataset base = generate_dataset(scenario, seed);
  const int n = static_cast<int>(base.size());

  FbpResult result;
  result.estimator = label(kind);
  result.n = n;
  result.step = step;
  result.detection = rule;

  int last_good = 0;
  bool fired = false;
  for (int m = 0; m <= n; m += step) {
    Rng rep_rng(seed + 1 + static_cast<std::uint64_t>(m));
    const Dataset data =
        replace_with_outliers(base, m, replacement.mean, replacement.sd, rep_rng);
    const AmplitudeEstimate est = estimate_amplitude(data, kind);

    FbpSweepPoint point;
    point.m = m;
    point.alpha_r = est.alpha_r.value;
    point.alpha_i = est.alpha_i.value;
    if (est.alpha_r.value == 0.0) {
      point.theta = rule.theta_target;  // undefined phase counts as broken
      point.fired = true;
    } else {
      point.theta = phase_from_amplitude(est.alpha_r.value, est.alpha_i.value);
      point.fired = rule.fires(point.theta, est.alpha_r.value, est.alpha_i.value);
    }
    result.sweep.push_back(point);
    if (point.fired) {
      fired = true;
      last_good = std::max(m - step, 0);
      break;
    }
    last_good = m;
  }

  result.no_breakdown = !fired;
  result.m_star = fired ? last_good : n;
  result.fbp = static_cast<double>(result.m_star) / n;
  return result;
}

/// Monte Carlo variance(mean) / variance(kind) for the alpha_r estimate on a
/// contamination-free scenario; both estimators see the same datasets.
inline double relative_efficiency(const EstimatorKind& kind, int n, int runs,
                                  std::uint64_t seed,
                                  const ComplexAmplitude& alpha = {10.0, 4.0}) {
  if (runs < 2) throw std::invalid_argument("relative_efficiency: runs must be >= 2");
  ContaminatedModel model(alpha, 0.0, SingleOutlier{{0.0, 0.0}, 0.0});
  ScenarioConfig scenario(n, model);

  double sum_k = 0.0, sumsq_k = 0.0, sum_m = 0.0, sumsq_m = 0.0;
  for (int r = 0; r < runs; ++r) {
    const Dataset data = generate_dataset(scenario, seed + static_cast<std::uint64_t>(r));
    const PhaseSplit split = split_by_phase(data);
    const double v_k = estimate_location(split.at_zero, kind).value;
    const double v_m = estimate_location(split.at_zero, MeanEstimator{}).value;
    sum_k += v_k;
    sumsq_k += v_k * v_k;
    sum_m += v_m;
    sumsq_m += v_m * v_m;
  }
  const double var_k = (sumsq_k - sum_k * sum_k / runs) / (runs - 1.0);
  const double var_m = (sumsq_m - sum_m * sum_m / runs) / (runs - 1.0);
  return var_m / var_k;
}

// ---------------------------------------------------------------------------
// Report serialization

namespace detail {
inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace detail

inline constexpr const char* replication_csv_header =
    "estimator,target,n,epsilon,runs,mean,bias,mse,sd,mean_iterations";

inline void write_replication_csv(const std::vector<ReplicationStats>& rows,
                                  std::ostream& os) {
  os << replication_csv_header << '\n';
  for (const auto& r : rows) {
    os << r.estimator << ',' << target_name(r.target) << ',' << r.n << ','
       << detail::fmt_double(r.epsilon) << ',' << r.runs << ','
       << detail::fmt_double(r.mean_estimate) << ',' << detail::fmt_double(r.bias)
       << ',' << detail::fmt_double(r.mse) << ',' << detail::fmt_double(r.sd) << ','
       << detail::fmt_double(r.mean_iterations) << '\n';
  }
}

inline std::vector<ReplicationStats> read_replication_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("report CSV: missing header");
  if (line != replication_csv_header)
    throw std::runtime_error("report CSV: unexpected header '" + line + "'");
  std::vector<ReplicationStats> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string f[10];
    for (int i = 0; i < 10; ++i)
      if (!std::getline(ss, f[i], ','))
        throw std::runtime_error("report CSV: malformed line " + std::to_string(lineno));
    ReplicationStats r;
    r.estimator = f[0];
    r.target = target_from_name(f[1]);
    r.n = std::stoi(f[2]);
    r.epsilon = std::stod(f[3]);
    r.runs = std::stoi(f[4]);
    r.mean_estimate = std::stod(f[5]);
    r.bias = std::stod(f[6]);
    r.mse = std::stod(f[7]);
    r.sd = std::stod(f[8]);
    r.mean_iterations = std::stod(f[9]);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline void write_fbp_csv(const std::vector<FbpResult>& results, std::ostream& os) {
  os << "estimator,target,n,m,theta,alpha_r,alpha_i,fired\n";
  for (const auto& res : results)
    for (const auto& p : res.sweep)
      os << res.estimator << ",theta," << res.n << ',' << p.m << ','
         << detail::fmt_double(p.theta) << ',' << detail::fmt_double(p.alpha_r) << ','
         << detail::fmt_double(p.alpha_i) << ',' << (p.fired ? 1 : 0) << '\n';
}

inline nlohmann::json to_json(const ReplicationStats& r) {
  return {{"estimator", r.estimator},
          {"target", target_name(r.target)},
          {"n", r.n},
          {"epsilon", r.epsilon},
          {"runs", r.runs},
          {"mean", r.mean_estimate},
          {"bias", r.bias},
          {"mse", r.mse},
          {"sd", r.sd},
          {"mean_iterations", r.mean_iterations}};
}

inline nlohmann::json to_json(const FbpResult& r) {
  return {{"estimator", r.estimator},
          {"n", r.n},
          {"step", r.step},
          {"m_star", r.m_star},
          {"fbp", r.fbp},
          {"no_breakdown", r.no_breakdown},
          {"detection",
           {{"theta_target", r.detection.theta_target},
            {"theta_tol", r.detection.theta_tol},
            {"magnitude_bound", r.detection.magnitude_bound}}}};
}

inline nlohmann::json to_json(const EstimateResult& r) {
  nlohmann::json j{{"value", r.value},
                   {"iterations", r.iterations},
                   {"converged", r.converged},
                   {"degenerate_weights", r.degenerate_weights}};
  if (r.trajectory) j["trajectory"] = *r.trajectory;
  return j;
}

}  // namespace qphase
