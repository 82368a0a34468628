#pragma once

// Canonical scenario constants used by the bundled studies and the CLI
// defaults. Every preset experiment reads its numbers from here.

#include <cstdint>
#include <vector>

#include "qphase/gaussian_model.hpp"
#include "qphase/robustness.hpp"

namespace qphase::presets {

inline constexpr double default_epsilon = 0.01;
inline constexpr int default_n = 5000;
inline constexpr std::uint64_t default_seed = 20201u;

/// Coherent state 10 + 4i contaminated by one thermal shift state at
/// 15 + 15i with dispersion 0.1.
inline ContaminatedModel single_outlier_model(double epsilon = default_epsilon) {
  return ContaminatedModel({10.0, 4.0}, epsilon, SingleOutlier{{15.0, 15.0}, 0.1});
}

/// Coherent state 10 - 4i contaminated by thermal shift states centered
/// near the vacuum: both center coordinates ~ N(0.1, 0.1), dispersion 0.1.
inline ContaminatedModel distributed_outlier_model(double epsilon = default_epsilon) {
  return ContaminatedModel({10.0, -4.0}, epsilon,
                           DistributedOutlier{0.1, 0.1, 0.1, 0.1, 0.1});
}

inline constexpr int fbp_step = 250;
inline constexpr Replacement fbp_replacement{1000.0, 0.1};

inline std::vector<double> default_eps_grid(double stop = 0.35, double step = 0.025) {
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double eps = i * step;
    if (eps > stop + 1e-12) break;
    grid.push_back(eps);
  }
  return grid;
}

inline std::vector<int> sample_size_sweep() { return {1000, 2000, 3000, 4000, 5000}; }

inline constexpr int replicate_runs = 500;
inline constexpr int eps_curve_runs = 100;
inline constexpr int efficiency_runs = 2000;
inline constexpr int efficiency_n = 1000;

inline std::vector<EstimatorKind> all_estimators() {
  return {MeanEstimator{}, MedianEstimator{}, MEstimator{PsiFamily::bisquare},
          MEstimator{PsiFamily::gamma}};
}

}  // namespace qphase::presets
