#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "qphase/presets.hpp"
#include "qphase/robustness.hpp"

using namespace qphase;

namespace {

ContaminatedModel single_model(double eps) {
  return ContaminatedModel({10.0, 4.0}, eps, SingleOutlier{{15.0, 15.0}, 0.1});
}

}  // namespace

TEST_CASE("run_replications statistics", "[robustness]") {
  SECTION("clean scenario: mean estimator is unbiased for theta") {
    const ScenarioConfig scenario(2000, single_model(0.0));
    const ReplicationStats stats =
        run_replications(scenario, MeanEstimator{}, Target::theta, 200, 1000);
    CHECK(std::abs(stats.bias) < 0.005);
    CHECK(stats.mean_iterations == 0.0);
  }

  SECTION("mixture mean shows up as bias of the sample mean") {
    const ScenarioConfig scenario(5000, single_model(0.01));
    const ReplicationStats stats =
        run_replications(scenario, MeanEstimator{}, Target::alpha_r, 100, 2024);
    CHECK(stats.mean_estimate == Catch::Approx(10.05).margin(0.01));
  }

  SECTION("gamma stays unbiased in the same scenario") {
    const ScenarioConfig scenario(5000, single_model(0.01));
    const ReplicationStats stats = run_replications(
        scenario, MEstimator{PsiFamily::gamma}, Target::alpha_r, 100, 2024);
    CHECK(std::abs(stats.bias) < 0.01);
  }

  SECTION("mse decomposes into bias^2 + variance") {
    const ScenarioConfig scenario(1000, single_model(0.05));
    const ReplicationStats stats =
        run_replications(scenario, MeanEstimator{}, Target::theta, 150, 77);
    const double var = stats.sd * stats.sd * (stats.runs - 1.0) / stats.runs;
    CHECK(stats.mse == Catch::Approx(stats.bias * stats.bias + var).margin(1e-12));
    CHECK(stats.mse >= stats.bias * stats.bias);
  }

  SECTION("deterministic given the base seed") {
    const ScenarioConfig scenario(500, single_model(0.01));
    const ReplicationStats a =
        run_replications(scenario, MEstimator{PsiFamily::bisquare}, Target::theta, 50, 5);
    const ReplicationStats b =
        run_replications(scenario, MEstimator{PsiFamily::bisquare}, Target::theta, 50, 5);
    CHECK(a.mean_estimate == b.mean_estimate);
    CHECK(a.mse == b.mse);
    CHECK(a.mean_iterations == b.mean_iterations);
  }
}

TEST_CASE("epsilon_curve", "[robustness]") {
  SECTION("grid validation") {
    const ContaminatedModel model = single_model(0.01);
    CHECK_THROWS_AS(epsilon_curve({0.2, 0.1}, 100, MeanEstimator{}, 5, 1, model),
                    std::invalid_argument);
    CHECK_THROWS_AS(epsilon_curve({-0.1, 0.2}, 100, MeanEstimator{}, 5, 1, model),
                    std::invalid_argument);
  }

  SECTION("point at eps = 0 matches run_replications") {
    const ContaminatedModel model = single_model(0.01);
    const EpsCurve curve =
        epsilon_curve({0.0, 0.1}, 500, MeanEstimator{}, 20, 99, model);
    REQUIRE(curve.points.size() == 2);
    const ScenarioConfig clean(500, single_model(0.0));
    const ReplicationStats direct =
        run_replications(clean, MeanEstimator{}, Target::theta, 20, 99);
    CHECK(curve.points[0].mean_estimate == direct.mean_estimate);
    CHECK(curve.points[0].sd == direct.sd);
  }

  SECTION("mean's alpha_r curve follows 10 + 5 eps") {
    const ContaminatedModel model = single_model(0.01);
    const EpsCurve curve = epsilon_curve({0.0, 0.1, 0.2}, 4000, MeanEstimator{}, 50,
                                         7321, model, Target::alpha_r);
    for (std::size_t j = 0; j < curve.points.size(); ++j) {
      const double eps = curve.points[j].epsilon;
      CHECK(curve.points[j].mean_estimate ==
            Catch::Approx(10.0 + 5.0 * eps).margin(0.02));
    }
  }
}

TEST_CASE("breakdown rule calibration against the closed-form mean sweep",
          "[robustness]") {
  // Independent oracle: after replacing a fraction rho of all records with
  // values at 1000, each split mean is (1 - rho) * base + rho * 1000 with
  // base 10.05 (phi = 0) and 4.11 (phi = pi/2). The first grid point
  // (step 250 out of n = 5000) where theta-hat comes within theta_tol of
  // arctan(1) fixes the mean's breakdown at m = 1750, i.e. FBP 1500/5000.
  const BreakdownRule rule = BreakdownRule::for_model(single_model(0.01));
  const double target = std::atan(1.0);
  int first_fire = -1;
  for (int m = 0; m <= 5000; m += 250) {
    const double rho = m / 5000.0;
    const double ar = (1.0 - rho) * 10.05 + rho * 1000.0;
    const double ai = (1.0 - rho) * 4.11 + rho * 1000.0;
    const double theta = std::atan(ai / ar);
    if (std::abs(theta - target) <= rule.theta_tol) {
      first_fire = m;
      break;
    }
  }
  REQUIRE(first_fire == 1750);
  CHECK((first_fire - 250) / 5000.0 == Catch::Approx(0.30));
}

TEST_CASE("finite_breakdown_point mechanics", "[robustness]") {
  const ScenarioConfig scenario(1000, single_model(0.01));
  const BreakdownRule rule = BreakdownRule::for_model(scenario.model);

  SECTION("m = 0 never triggers breakdown") {
    for (const auto& kind : presets::all_estimators()) {
      const FbpResult res =
          finite_breakdown_point(scenario, kind, rule, 100, {1000.0, 0.1}, 11);
      REQUIRE_FALSE(res.sweep.empty());
      CHECK_FALSE(res.sweep.front().fired);
      CHECK(res.m_star >= 0);
    }
  }

  SECTION("sweep stops at the first firing m") {
    const FbpResult res =
        finite_breakdown_point(scenario, MeanEstimator{}, rule, 100, {1000.0, 0.1}, 11);
    REQUIRE_FALSE(res.no_breakdown);
    for (std::size_t i = 0; i + 1 < res.sweep.size(); ++i) CHECK_FALSE(res.sweep[i].fired);
    CHECK(res.sweep.back().fired);
    CHECK(res.m_star == res.sweep.back().m - res.step);
    CHECK(res.fbp == Catch::Approx(res.m_star / 1000.0));
  }

  SECTION("a rule that can never fire reports no-breakdown") {
    BreakdownRule inert = rule;
    inert.theta_tol = 1e-12;
    inert.theta_target = -1.5;  // unreachable for this data
    inert.magnitude_bound = 1e9;
    const FbpResult res = finite_breakdown_point(scenario, MedianEstimator{}, inert,
                                                 250, {1000.0, 0.1}, 13);
    CHECK(res.no_breakdown);
    CHECK(res.m_star == 1000);
    CHECK(res.fbp == 1.0);
  }

  SECTION("deterministic in the seed") {
    const FbpResult a =
        finite_breakdown_point(scenario, MeanEstimator{}, rule, 100, {1000.0, 0.1}, 21);
    const FbpResult b =
        finite_breakdown_point(scenario, MeanEstimator{}, rule, 100, {1000.0, 0.1}, 21);
    CHECK(a.m_star == b.m_star);
    REQUIRE(a.sweep.size() == b.sweep.size());
    for (std::size_t i = 0; i < a.sweep.size(); ++i)
      CHECK(a.sweep[i].theta == b.sweep[i].theta);
  }
}

TEST_CASE("robust estimators beat the mean on contaminated phase MSE",
          "[robustness]") {
  // Single-outlier scenario: the mean's theta bias (~0.0076) dominates its
  // MSE while the M-estimators reject the outlier cloud outright.
  const ScenarioConfig scenario(2000, single_model(0.01));
  const int runs = 120;
  const auto mse_of = [&](const EstimatorKind& kind) {
    return run_replications(scenario, kind, Target::theta, runs, 4242).mse;
  };
  const double mean = mse_of(MeanEstimator{});
  CHECK(mse_of(MEstimator{PsiFamily::gamma}) < mean);
  CHECK(mse_of(MEstimator{PsiFamily::bisquare}) < mean);
}

TEST_CASE("relative_efficiency basics", "[robustness]") {
  SECTION("mean against itself is exactly 1") {
    CHECK(relative_efficiency(MeanEstimator{}, 500, 200, 3) == 1.0);
  }
  SECTION("median efficiency is near 2/pi") {
    const double eta = relative_efficiency(MedianEstimator{}, 1000, 800, 5);
    CHECK(eta == Catch::Approx(0.64).margin(0.10));
  }
}

TEST_CASE("report CSV round trip", "[robustness]") {
  const ScenarioConfig scenario(300, single_model(0.02));
  std::vector<ReplicationStats> rows;
  rows.push_back(run_replications(scenario, MeanEstimator{}, Target::theta, 10, 1));
  rows.push_back(run_replications(scenario, MEstimator{PsiFamily::gamma},
                                  Target::alpha_r, 10, 1));

  std::ostringstream os;
  write_replication_csv(rows, os);
  std::istringstream is(os.str());
  const auto back = read_replication_csv(is);

  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].estimator == rows[i].estimator);
    CHECK(back[i].target == rows[i].target);
    CHECK(back[i].n == rows[i].n);
    CHECK(back[i].epsilon == rows[i].epsilon);
    CHECK(back[i].mean_estimate == rows[i].mean_estimate);
    CHECK(back[i].bias == rows[i].bias);
    CHECK(back[i].mse == rows[i].mse);
    CHECK(back[i].sd == rows[i].sd);
    CHECK(back[i].mean_iterations == rows[i].mean_iterations);
  }

  // emit -> parse -> emit is a fixpoint
  std::ostringstream os2;
  write_replication_csv(back, os2);
  CHECK(os2.str() == os.str());
}
