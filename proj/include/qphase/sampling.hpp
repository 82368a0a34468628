#pragma once

// Seeded generation of homodyne measurement datasets from contaminated
// models, data replacement for breakdown sweeps, and dataset CSV I/O.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qphase/gaussian_model.hpp"

namespace qphase {

using Rng = std::mt19937_64;

enum class Source { ideal, outlier };

/// One homodyne shot: quadrature angle, outcome, and a diagnostic tag telling
/// which mixture branch generated it. Estimators never read the tag.
struct MeasurementRecord {
  double phi{0.0};
  double x{0.0};
  Source source{Source::ideal};
};

struct Dataset {
  std::vector<MeasurementRecord> records;
  std::uint64_t seed{0};

  std::size_t size() const { return records.size(); }
};

enum class PhiRule { bernoulli_half };

struct ScenarioConfig {
  int n{0};
  ContaminatedModel model;
  PhiRule phi_rule{PhiRule::bernoulli_half};

  ScenarioConfig() = default;
  ScenarioConfig(int n_, ContaminatedModel model_,
                 PhiRule rule = PhiRule::bernoulli_half)
      : n(n_), model(std::move(model_)), phi_rule(rule) {
    if (n < 1)
      throw std::invalid_argument("ScenarioConfig: n must be >= 1");
  }
};

/// One shot at angle phi: Bernoulli(eps) picks the outlier branch, then the
/// outcome is drawn from that branch's normal law.
inline MeasurementRecord draw_measurement(const ContaminatedModel& model,
                                          double phi, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const bool outlier = unit(rng) < model.epsilon;
  const NormalParams p = outlier ? outlier_component(model.outliers, phi)
                                 : ideal_component(model.alpha, phi);
  std::normal_distribution<double> normal(p.mean, p.sigma);
  return {phi, normal(rng), outlier ? Source::outlier : Source::ideal};
}

/// n shots with phi flipped fair-coin between 0 and pi/2. Identical seeds
/// yield identical datasets bit-for-bit.
inline Dataset generate_dataset(const ScenarioConfig& config, std::uint64_t seed) {
  if (config.n < 1)
    throw std::invalid_argument("generate_dataset: n must be >= 1");
  Rng rng(seed);
  std::bernoulli_distribution coin(0.5);
  Dataset out;
  out.seed = seed;
  out.records.reserve(static_cast<std::size_t>(config.n));
  for (int i = 0; i < config.n; ++i) {
    const double phi = coin(rng) ? half_pi : 0.0;
    out.records.push_back(draw_measurement(config.model, phi, rng));
  }
  return out;
}

/// Overwrites the x of exactly m uniformly chosen records (no replacement)
/// with draws from N(replacement_mean, replacement_sd). Each record keeps its
/// phi; replaced records are tagged as outliers.
inline Dataset replace_with_outliers(const Dataset& dataset, int m,
                                     double replacement_mean,
                                     double replacement_sd, Rng& rng) {
  const int n = static_cast<int>(dataset.records.size());
  if (m < 0 || m > n)
    throw std::invalid_argument("replace_with_outliers: need 0 <= m <= n");
  Dataset out = dataset;
  if (m == 0) return out;

  // Partial Fisher-Yates over the index range picks m distinct records.
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::normal_distribution<double> normal(replacement_mean, replacement_sd);
  for (int k = 0; k < m; ++k) {
    std::uniform_int_distribution<int> pick(k, n - 1);
    std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(pick(rng))]);
    auto& rec = out.records[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])];
    rec.x = normal(rng);
    rec.source = Source::outlier;
  }
  return out;
}

struct PhaseSplit {
  std::vector<double> at_zero;
  std::vector<double> at_half_pi;
};

/// Partitions outcomes by angle, preserving within-group order. Records at
/// angles other than 0 and pi/2 are rejected.
inline PhaseSplit split_by_phase(const Dataset& dataset) {
  PhaseSplit split;
  for (const auto& rec : dataset.records) {
    if (rec.phi == 0.0)
      split.at_zero.push_back(rec.x);
    else if (rec.phi == half_pi)
      split.at_half_pi.push_back(rec.x);
    else
      throw std::invalid_argument("split_by_phase: unsupported angle " +
                                  std::to_string(rec.phi));
  }
  return split;
}

// ---------------------------------------------------------------------------
// Dataset CSV: header "phi,x,source"; source is optional on import.

inline void write_dataset_csv(const Dataset& dataset, std::ostream& os) {
  os << "phi,x,source\n";
  char buf[64];
  for (const auto& rec : dataset.records) {
    std::snprintf(buf, sizeof(buf), "%.17g", rec.phi);
    os << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", rec.x);
    os << buf << ',' << (rec.source == Source::ideal ? "Ideal" : "Outlier")
       << '\n';
  }
}

inline void write_dataset_csv(const Dataset& dataset, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_dataset_csv(dataset, os);
}

inline Dataset read_dataset_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("dataset CSV: missing header");
  if (line.ends_with("\r")) line.pop_back();
  const bool has_source = (line == "phi,x,source");
  if (!has_source && line != "phi,x")
    throw std::runtime_error("dataset CSV: unexpected header '" + line + "'");

  Dataset out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.ends_with("\r")) line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string phi_s, x_s, src_s;
    if (!std::getline(ss, phi_s, ',') || !std::getline(ss, x_s, ','))
      throw std::runtime_error("dataset CSV: malformed line " +
                               std::to_string(lineno));
    std::getline(ss, src_s, ',');

    MeasurementRecord rec;
    char* end = nullptr;
    rec.phi = std::strtod(phi_s.c_str(), &end);
    if (end == phi_s.c_str())
      throw std::runtime_error("dataset CSV: bad phi on line " +
                               std::to_string(lineno));
    rec.x = std::strtod(x_s.c_str(), &end);
    if (end == x_s.c_str())
      throw std::runtime_error("dataset CSV: bad x on line " +
                               std::to_string(lineno));
    if (src_s.empty() || src_s == "Ideal")
      rec.source = Source::ideal;
    else if (src_s == "Outlier")
      rec.source = Source::outlier;
    else
      throw std::runtime_error("dataset CSV: bad source on line " +
                               std::to_string(lineno));
    out.records.push_back(rec);
  }
  return out;
}

inline Dataset read_dataset_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return read_dataset_csv(is);
}

}  // namespace qphase
