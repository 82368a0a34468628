#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "qphase/gaussian_model.hpp"
#include "qphase/sampling.hpp"

using namespace qphase;

namespace {

ContaminatedModel single_model(double eps) {
  return ContaminatedModel({10.0, 4.0}, eps, SingleOutlier{{15.0, 15.0}, 0.1});
}

// Kolmogorov-Smirnov distance between a sample and the model cdf at fixed phi.
double ks_distance(std::vector<double> xs, const ContaminatedModel& model, double phi) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = contaminated_cdf(model, phi, xs[i]);
    d = std::max(d, std::abs((i + 1) / n - f));
    d = std::max(d, std::abs(i / n - f));
  }
  return d;
}

}  // namespace

TEST_CASE("draw_measurement branch statistics", "[sampling]") {
  SECTION("eps = 0 always samples the ideal branch") {
    const ContaminatedModel model = single_model(0.0);
    Rng rng(11);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const MeasurementRecord rec = draw_measurement(model, 0.0, rng);
      REQUIRE(rec.source == Source::ideal);
      sum += rec.x;
    }
    CHECK(sum / n == Catch::Approx(10.0).margin(0.01));
  }

  SECTION("eps = 0.999 fires the outlier branch almost always") {
    const ContaminatedModel model = single_model(0.999);
    Rng rng(12);
    int outliers = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i)
      if (draw_measurement(model, 0.0, rng).source == Source::outlier) ++outliers;
    CHECK(std::abs(outliers / double(n) - 0.999) < 0.001);
  }

  SECTION("1e6 draws match the mixture mean 10.05") {
    const ContaminatedModel model = single_model(0.01);
    Rng rng(13);
    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) sum += draw_measurement(model, 0.0, rng).x;
    CHECK(sum / n == Catch::Approx(10.05).margin(0.01));
  }
}

TEST_CASE("generate_dataset contract", "[sampling]") {
  const ScenarioConfig config(5000, single_model(0.01));

  SECTION("identical seeds give identical datasets") {
    const Dataset a = generate_dataset(config, 42);
    const Dataset b = generate_dataset(config, 42);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a.records[i].phi == b.records[i].phi);
      CHECK(a.records[i].x == b.records[i].x);
      CHECK(a.records[i].source == b.records[i].source);
    }
  }

  SECTION("different seeds differ") {
    const Dataset a = generate_dataset(config, 42);
    const Dataset b = generate_dataset(config, 43);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a.records[i].x != b.records[i].x) any_diff = true;
    CHECK(any_diff);
  }

  SECTION("record count and phi balance") {
    const Dataset data = generate_dataset(config, 7);
    REQUIRE(data.size() == 5000);
    const PhaseSplit split = split_by_phase(data);
    CHECK(split.at_zero.size() + split.at_half_pi.size() == 5000);
    CHECK(std::abs(static_cast<double>(split.at_zero.size()) - 2500.0) <= 200.0);
  }

  SECTION("outlier tag count concentrates near n*eps") {
    const Dataset data = generate_dataset(config, 8);
    int outliers = 0;
    for (const auto& rec : data.records)
      if (rec.source == Source::outlier) ++outliers;
    // Binomial(5000, 0.01): mean 50, sd ~ 7; allow 4 sd
    CHECK(std::abs(outliers - 50.0) <= 29.0);
  }

  SECTION("n = 0 is rejected") {
    CHECK_THROWS_AS(ScenarioConfig(0, single_model(0.01)), std::invalid_argument);
  }
}

TEST_CASE("sampled outcomes match the model distribution (KS)", "[sampling]") {
  for (double eps : {0.0, 0.01, 0.3}) {
    const ContaminatedModel model = single_model(eps);
    Rng rng(101 + static_cast<std::uint64_t>(eps * 1000));
    std::vector<double> xs;
    xs.reserve(100000);
    for (int i = 0; i < 100000; ++i) xs.push_back(draw_measurement(model, 0.0, rng).x);
    CHECK(ks_distance(std::move(xs), model, 0.0) < 0.01);
  }
}

TEST_CASE("replace_with_outliers", "[sampling]") {
  const ScenarioConfig config(5000, single_model(0.01));
  const Dataset base = generate_dataset(config, 99);

  SECTION("m = 0 is a no-op") {
    Rng rng(1);
    const Dataset out = replace_with_outliers(base, 0, 1000.0, 0.1, rng);
    for (std::size_t i = 0; i < base.size(); ++i)
      CHECK(out.records[i].x == base.records[i].x);
  }

  SECTION("m = n replaces everything") {
    Rng rng(2);
    const Dataset out = replace_with_outliers(base, 5000, 1000.0, 0.1, rng);
    double sum = 0.0;
    for (const auto& rec : out.records) sum += rec.x;
    CHECK(sum / 5000.0 == Catch::Approx(1000.0).margin(0.05));
  }

  SECTION("m = 250 changes exactly 250 records and never phi") {
    Rng rng(3);
    const Dataset out = replace_with_outliers(base, 250, 1000.0, 0.1, rng);
    int changed = 0;
    for (std::size_t i = 0; i < base.size(); ++i) {
      CHECK(out.records[i].phi == base.records[i].phi);
      if (out.records[i].x != base.records[i].x) ++changed;
    }
    CHECK(changed == 250);
  }

  SECTION("m > n is rejected") {
    Rng rng(4);
    CHECK_THROWS_AS(replace_with_outliers(base, 5001, 1000.0, 0.1, rng),
                    std::invalid_argument);
  }
}

TEST_CASE("split_by_phase", "[sampling]") {
  SECTION("records at a single angle") {
    Dataset data;
    data.records = {{0.0, 1.0, Source::ideal},
                    {0.0, 2.0, Source::ideal},
                    {0.0, 3.0, Source::ideal}};
    const PhaseSplit split = split_by_phase(data);
    CHECK(split.at_zero == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(split.at_half_pi.empty());
  }

  SECTION("alternating angles preserve within-group order") {
    Dataset data;
    data.records = {{0.0, 1.0, Source::ideal},
                    {half_pi, 2.0, Source::ideal},
                    {0.0, 3.0, Source::ideal},
                    {half_pi, 4.0, Source::ideal}};
    const PhaseSplit split = split_by_phase(data);
    CHECK(split.at_zero == std::vector<double>{1.0, 3.0});
    CHECK(split.at_half_pi == std::vector<double>{2.0, 4.0});
  }

  SECTION("unsupported angle is rejected") {
    Dataset data;
    data.records = {{0.25, 1.0, Source::ideal}};
    CHECK_THROWS_AS(split_by_phase(data), std::invalid_argument);
  }
}

TEST_CASE("dataset CSV round trip", "[sampling]") {
  const ScenarioConfig config(500, single_model(0.05));
  const Dataset data = generate_dataset(config, 314);

  std::ostringstream os;
  write_dataset_csv(data, os);
  std::istringstream is(os.str());
  const Dataset back = read_dataset_csv(is);

  REQUIRE(back.size() == data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(back.records[i].phi == data.records[i].phi);
    CHECK(back.records[i].x == data.records[i].x);
    CHECK(back.records[i].source == data.records[i].source);
  }

  SECTION("source column is optional") {
    std::istringstream two_cols("phi,x\n0,1.5\n1.5707963267948966,-2\n");
    const Dataset parsed = read_dataset_csv(two_cols);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed.records[0].source == Source::ideal);
    CHECK(parsed.records[1].phi == half_pi);
  }

  SECTION("bad header is rejected") {
    std::istringstream bad("x,phi\n1,2\n");
    CHECK_THROWS_AS(read_dataset_csv(bad), std::runtime_error);
  }
}
