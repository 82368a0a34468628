#pragma once

// Location estimators: mean, median, and M-estimators defined by psi
// functions, solved by iterative reweighting. Robust scale (MAD/MADN),
// the tuning policy, and the amplitude-to-phase conversion live here too.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qphase/sampling.hpp"

namespace qphase {

/// Middle order statistic; for even length, the average of the two middle values.
inline double median(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("median: empty data");
  std::vector<double> buf(xs.begin(), xs.end());
  const std::size_t mid = buf.size() / 2;
  std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(mid), buf.end());
  const double upper = buf[mid];
  if (buf.size() % 2 == 1) return upper;
  const double lower =
      *std::max_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

/// Normalized median absolute deviation: median(|x - median(x)|) / 0.675.
inline double madn(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("madn: empty data");
  const double med = median(xs);
  std::vector<double> devs;
  devs.reserve(xs.size());
  for (double x : xs) devs.push_back(std::abs(x - med));
  return median(devs) / 0.675;
}

// ---------------------------------------------------------------------------
// psi functions

/// Tukey's bisquare: psi(r) = r (1 - (r/c)^2)^2 for |r| <= c, else 0.
struct BisquarePsi {
  double c{1.0};

  BisquarePsi() = default;
  explicit BisquarePsi(double c_) : c(c_) {
    if (!(c > 0.0)) throw std::invalid_argument("BisquarePsi: c must be > 0");
  }
};

/// psi(r) = [N(0, sigma) density at r]^gamma * r; redescends exponentially.
struct GammaPsi {
  double gamma{0.5};
  double sigma{1.0};

  GammaPsi() = default;
  GammaPsi(double gamma_, double sigma_) : gamma(gamma_), sigma(sigma_) {
    if (!(gamma > 0.0)) throw std::invalid_argument("GammaPsi: gamma must be > 0");
    if (!(sigma > 0.0)) throw std::invalid_argument("GammaPsi: sigma must be > 0");
  }
};

/// psi(r) = r, the normal-location score up to positive scale.
struct MleNormalPsi {};

using PsiKind = std::variant<BisquarePsi, GammaPsi, MleNormalPsi>;

/// W(r) = psi(r)/r extended by its limit at r = 0; always finite and >= 0.
inline double weight(const PsiKind& kind, double r) {
  if (const auto* b = std::get_if<BisquarePsi>(&kind)) {
    if (std::abs(r) > b->c) return 0.0;
    const double u = r / b->c;
    const double t = 1.0 - u * u;
    return t * t;
  }
  if (const auto* g = std::get_if<GammaPsi>(&kind)) {
    const double s2 = g->sigma * g->sigma;
    return std::pow(2.0 * std::numbers::pi * s2, -0.5 * g->gamma) *
           std::exp(-g->gamma * r * r / (2.0 * s2));
  }
  return 1.0;
}

/// psi evaluated at residual r; odd in r by construction.
inline double psi(const PsiKind& kind, double r) { return weight(kind, r) * r; }

// ---------------------------------------------------------------------------
// Iterative reweighting

enum class Initializer { median };

struct IrlsConfig {
  double tol{1e-6};
  int max_iter{100};
  Initializer initializer{Initializer::median};
  bool record_trajectory{false};

  IrlsConfig() = default;
  IrlsConfig(double tol_, int max_iter_, bool record = false)
      : tol(tol_), max_iter(max_iter_), record_trajectory(record) {
    if (!(tol > 0.0)) throw std::invalid_argument("IrlsConfig: tol must be > 0");
    if (max_iter < 1) throw std::invalid_argument("IrlsConfig: max_iter must be >= 1");
  }
};

struct EstimateResult {
  double value{0.0};
  int iterations{0};
  bool converged{false};
  bool degenerate_weights{false};
  std::optional<std::vector<double>> trajectory;
};

/// Sum of psi(x_i - mu); zero exactly at M-estimator roots.
inline double m_equation_residual(std::span<const double> xs, const PsiKind& kind,
                                  double mu) {
  double sum = 0.0;
  for (double x : xs) sum += psi(kind, x - mu);
  return sum;
}

/// Weighted-mean iteration mu <- sum W(x-mu) x / sum W(x-mu), started at the
/// median. Stops when successive iterates differ by at most tol, or after
/// max_iter steps. A vanishing weight total (all data rejected) returns the
/// current iterate flagged degenerate instead of raising.
inline EstimateResult irls_solve(std::span<const double> xs, const PsiKind& kind,
                                 const IrlsConfig& config = {}) {
  if (xs.empty()) throw std::invalid_argument("irls_solve: empty data");
  EstimateResult result;
  double mu = median(xs);
  if (config.record_trajectory) result.trajectory.emplace().push_back(mu);

  for (int iter = 0; iter < config.max_iter; ++iter) {
    double sw = 0.0;
    double swx = 0.0;
    for (double x : xs) {
      const double w = weight(kind, x - mu);
      sw += w;
      swx += w * x;
    }
    if (sw < 1e-30) {
      result.value = mu;
      result.degenerate_weights = true;
      return result;
    }
    const double next = swx / sw;
    ++result.iterations;
    if (config.record_trajectory) result.trajectory->push_back(next);
    const bool done = std::abs(next - mu) <= config.tol;
    mu = next;
    if (done) {
      result.converged = true;
      break;
    }
  }
  result.value = mu;
  return result;
}

/// Independent root finder for the M-equation: scans a uniform grid for the
/// sign change nearest the median of xs and refines it by bisection to 1e-8.
inline double grid_root(std::span<const double> xs, const PsiKind& kind,
                        double lo, double hi, int resolution) {
  if (!(lo < hi)) throw std::invalid_argument("grid_root: need lo < hi");
  if (resolution < 1) throw std::invalid_argument("grid_root: resolution must be >= 1");

  const double med = median(xs);
  const double h = (hi - lo) / resolution;
  double best_a = 0.0, best_b = 0.0, best_fa = 0.0;
  double best_dist = std::numeric_limits<double>::infinity();
  bool found = false;

  double prev_mu = lo;
  double prev_f = m_equation_residual(xs, kind, lo);
  for (int i = 1; i <= resolution; ++i) {
    const double mu = lo + i * h;
    const double f = m_equation_residual(xs, kind, mu);
    if (prev_f == 0.0) {
      const double dist = std::abs(prev_mu - med);
      if (dist < best_dist) {
        best_dist = dist;
        best_a = best_b = prev_mu;
        best_fa = 0.0;
        found = true;
      }
    } else if (f != 0.0 && std::signbit(f) != std::signbit(prev_f)) {
      const double dist = std::abs(0.5 * (prev_mu + mu) - med);
      if (dist < best_dist) {
        best_dist = dist;
        best_a = prev_mu;
        best_b = mu;
        best_fa = prev_f;
        found = true;
      }
    }
    prev_mu = mu;
    prev_f = f;
  }
  if (prev_f == 0.0 && std::abs(prev_mu - med) < best_dist) {
    best_a = best_b = prev_mu;
    found = true;
  }
  if (!found)
    throw std::runtime_error("grid_root: no sign change bracketed in [lo, hi]");
  if (best_a == best_b) return best_a;

  double a = best_a, b = best_b, fa = best_fa;
  while (b - a > 1e-8) {
    const double mid = 0.5 * (a + b);
    const double fm = m_equation_residual(xs, kind, mid);
    if (fm == 0.0) return mid;
    if (std::signbit(fm) == std::signbit(fa)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

// ---------------------------------------------------------------------------
// Estimator kinds and tuning

enum class PsiFamily { bisquare, gamma, mle_normal };

/// Data-driven psi parameters: sigma-hat is the MADN of the sample at hand,
/// bisquare's cutoff is c = bisquare_c_factor * sigma-hat, and gamma's scale
/// plug-in is sigma-hat itself.
struct TuningPolicy {
  double bisquare_c_factor{4.68};
  double gamma_exponent{0.5};
  enum class SigmaSource { madn_of_data };
  SigmaSource gamma_sigma_source{SigmaSource::madn_of_data};
};

struct MeanEstimator {};
struct MedianEstimator {};
struct MEstimator {
  PsiFamily family{PsiFamily::bisquare};
  TuningPolicy tuning{};
  IrlsConfig irls{};
};

using EstimatorKind = std::variant<MeanEstimator, MedianEstimator, MEstimator>;

inline std::string label(const EstimatorKind& kind) {
  if (std::holds_alternative<MeanEstimator>(kind)) return "mean";
  if (std::holds_alternative<MedianEstimator>(kind)) return "median";
  switch (std::get<MEstimator>(kind).family) {
    case PsiFamily::bisquare: return "bisquare";
    case PsiFamily::gamma: return "gamma";
    case PsiFamily::mle_normal: return "mle";
  }
  return "unknown";
}

/// Instantiates a concrete psi for this sample under the tuning policy.
/// A zero MADN (all points equal) is clamped to 1e-12; such data are
/// pathological for scale-tuned estimators.
inline PsiKind make_psi(PsiFamily family, const TuningPolicy& tuning,
                        std::span<const double> xs) {
  const double sigma_hat = std::max(madn(xs), 1e-12);
  switch (family) {
    case PsiFamily::bisquare:
      return BisquarePsi{tuning.bisquare_c_factor * sigma_hat};
    case PsiFamily::gamma:
      return GammaPsi{tuning.gamma_exponent, sigma_hat};
    case PsiFamily::mle_normal:
      return MleNormalPsi{};
  }
  throw std::logic_error("make_psi: unreachable");
}

inline EstimateResult estimate_location(std::span<const double> xs,
                                        const EstimatorKind& kind) {
  if (xs.empty()) throw std::invalid_argument("estimate_location: empty data");
  if (std::holds_alternative<MeanEstimator>(kind)) {
    const double sum = std::accumulate(xs.begin(), xs.end(), 0.0);
    return {sum / static_cast<double>(xs.size()), 0, true, false, std::nullopt};
  }
  if (std::holds_alternative<MedianEstimator>(kind))
    return {median(xs), 0, true, false, std::nullopt};
  const auto& m = std::get<MEstimator>(kind);
  return irls_solve(xs, make_psi(m.family, m.tuning, xs), m.irls);
}

struct AmplitudeEstimate {
  EstimateResult alpha_r;
  EstimateResult alpha_i;
};

/// Splits by phase and estimates Re(alpha) from the phi = 0 outcomes and
/// Im(alpha) from the phi = pi/2 outcomes, tuning each split independently.
inline AmplitudeEstimate estimate_amplitude(const Dataset& dataset,
                                            const EstimatorKind& kind) {
  const PhaseSplit split = split_by_phase(dataset);
  if (split.at_zero.empty())
    throw std::invalid_argument("estimate_amplitude: no records at phi = 0");
  if (split.at_half_pi.empty())
    throw std::invalid_argument("estimate_amplitude: no records at phi = pi/2");
  return {estimate_location(split.at_zero, kind),
          estimate_location(split.at_half_pi, kind)};
}

/// theta = arctan(alpha_i / alpha_r), in (-pi/2, pi/2).
inline double phase_from_amplitude(double alpha_r, double alpha_i) {
  if (alpha_r == 0.0)
    throw std::domain_error("phase_from_amplitude: alpha_r must be nonzero");
  return std::atan(alpha_i / alpha_r);
}

}  // namespace qphase
