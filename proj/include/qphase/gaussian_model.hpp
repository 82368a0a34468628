#pragma once

// Closed-form homodyne measurement statistics for coherent states, thermal
// Gaussian shift states, and their convex (contaminated) mixtures.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <variant>

namespace qphase {

inline constexpr double half_pi = std::numbers::pi / 2.0;

/// Complex displacement in phase space, held as (re, im) quadrature parts.
struct ComplexAmplitude {
  double re{0.0};
  double im{0.0};

  ComplexAmplitude() = default;
  ComplexAmplitude(double re_, double im_) : re(re_), im(im_) {
    if (!std::isfinite(re) || !std::isfinite(im))
      throw std::invalid_argument("ComplexAmplitude: fields must be finite");
  }

  double abs() const { return std::hypot(re, im); }
};

/// kappa = sqrt(1 / (2 (e^beta - 1))); strictly decreasing in beta.
inline double kappa_from_beta(double beta) {
  if (!(beta > 0.0))
    throw std::domain_error("kappa_from_beta: beta must be > 0");
  return std::sqrt(1.0 / (2.0 * std::expm1(beta)));
}

/// beta = ln(1 + 1 / (2 kappa^2)); exact inverse of kappa_from_beta.
inline double beta_from_kappa(double kappa) {
  if (!(kappa > 0.0))
    throw std::domain_error("beta_from_kappa: kappa must be > 0");
  return std::log1p(1.0 / (2.0 * kappa * kappa));
}

/// Mean homodyne outcome at quadrature angle phi: Re(z e^{-i phi}).
inline double homodyne_mean(const ComplexAmplitude& z, double phi) {
  return z.re * std::cos(phi) + z.im * std::sin(phi);
}

/// Standard deviation of the homodyne outcome for dispersion kappa:
/// sqrt(kappa^2 + 1/4). kappa = 0 gives the coherent-state value 1/2.
inline double homodyne_sigma(double kappa) {
  if (kappa < 0.0)
    throw std::domain_error("homodyne_sigma: kappa must be >= 0");
  return std::sqrt(kappa * kappa + 0.25);
}

/// Thermal state displaced by `center` with dispersion `kappa`.
struct GaussianShiftState {
  ComplexAmplitude center;
  double kappa{0.0};

  GaussianShiftState() = default;
  GaussianShiftState(ComplexAmplitude center_, double kappa_)
      : center(center_), kappa(kappa_) {
    if (!(kappa >= 0.0))
      throw std::invalid_argument("GaussianShiftState: kappa must be >= 0");
  }
};

/// One fixed outlier state at z0 with dispersion kappa0.
struct SingleOutlier {
  ComplexAmplitude z0;
  double kappa0{0.0};

  SingleOutlier() = default;
  SingleOutlier(ComplexAmplitude z0_, double kappa0_) : z0(z0_), kappa0(kappa0_) {
    if (!(kappa0 >= 0.0))
      throw std::invalid_argument("SingleOutlier: kappa0 must be >= 0");
  }
};

/// Outlier centers drawn from independent normals on the phase-space axes,
/// all with dispersion kappa0.
struct DistributedOutlier {
  double mu1{0.0};
  double sigma1{1.0};
  double mu2{0.0};
  double sigma2{1.0};
  double kappa0{0.0};

  DistributedOutlier() = default;
  DistributedOutlier(double mu1_, double sigma1_, double mu2_, double sigma2_,
                     double kappa0_)
      : mu1(mu1_), sigma1(sigma1_), mu2(mu2_), sigma2(sigma2_), kappa0(kappa0_) {
    if (!(sigma1 > 0.0) || !(sigma2 > 0.0))
      throw std::invalid_argument("DistributedOutlier: sigmas must be > 0");
    if (!(kappa0 >= 0.0))
      throw std::invalid_argument("DistributedOutlier: kappa0 must be >= 0");
  }
};

using OutlierSpec = std::variant<SingleOutlier, DistributedOutlier>;

/// Mean/sigma pair of a normal outcome distribution.
struct NormalParams {
  double mean{0.0};
  double sigma{1.0};

  double pdf(double x) const {
    const double z = (x - mean) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::numbers::sqrt2 *
                                     std::sqrt(std::numbers::pi));
  }

  double cdf(double x) const {
    const double z = (x - mean) / (sigma * std::numbers::sqrt2);
    return 0.5 * std::erfc(-z);
  }
};

/// Outcome distribution of the ideal coherent state at angle phi.
inline NormalParams ideal_component(const ComplexAmplitude& alpha, double phi) {
  return {homodyne_mean(alpha, phi), 0.5};
}

/// Outcome distribution of a Gaussian shift state at angle phi:
/// N(Re(z e^{-i phi}), sqrt(kappa^2 + 1/4)).
inline NormalParams homodyne_statistics(const GaussianShiftState& state, double phi) {
  return {homodyne_mean(state.center, phi), homodyne_sigma(state.kappa)};
}

/// Outcome distribution of the outlier branch at angle phi. The distributed
/// case folds the center spread into the width by normal convolution.
inline NormalParams outlier_component(const OutlierSpec& spec, double phi) {
  if (const auto* s = std::get_if<SingleOutlier>(&spec))
    return homodyne_statistics({s->z0, s->kappa0}, phi);
  const auto& d = std::get<DistributedOutlier>(spec);
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  const double var = d.sigma1 * d.sigma1 * c * c + d.sigma2 * d.sigma2 * s * s +
                     d.kappa0 * d.kappa0 + 0.25;
  return {d.mu1 * c + d.mu2 * s, std::sqrt(var)};
}

/// Convex mixture (1-eps) ideal + eps outlier; fully determines the induced
/// homodyne statistics at every angle.
struct ContaminatedModel {
  ComplexAmplitude alpha;
  double epsilon{0.0};
  OutlierSpec outliers{SingleOutlier{}};

  ContaminatedModel() = default;
  ContaminatedModel(ComplexAmplitude alpha_, double epsilon_, OutlierSpec outliers_)
      : alpha(alpha_), epsilon(epsilon_), outliers(std::move(outliers_)) {
    if (!(epsilon >= 0.0 && epsilon < 1.0))
      throw std::invalid_argument("ContaminatedModel: epsilon must be in [0,1)");
  }
};

/// Density of the homodyne outcome x at angle phi under the contaminated model.
inline double contaminated_pdf(const ContaminatedModel& model, double phi, double x) {
  const double ideal = ideal_component(model.alpha, phi).pdf(x);
  if (model.epsilon == 0.0) return ideal;
  const double out = outlier_component(model.outliers, phi).pdf(x);
  return (1.0 - model.epsilon) * ideal + model.epsilon * out;
}

/// Matching cumulative distribution, used for goodness-of-fit checks.
inline double contaminated_cdf(const ContaminatedModel& model, double phi, double x) {
  const double ideal = ideal_component(model.alpha, phi).cdf(x);
  if (model.epsilon == 0.0) return ideal;
  const double out = outlier_component(model.outliers, phi).cdf(x);
  return (1.0 - model.epsilon) * ideal + model.epsilon * out;
}

}  // namespace qphase
