#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "mspacings/errors.hpp"
#include "mspacings/random.hpp"
#include "mspacings/stest.hpp"
#include "oracles.hpp"

using namespace mspacings;
using namespace mspacings::stest;

namespace {

std::vector<double> uniform_sample(std::uint64_t seed, std::size_t n, double a = 0, double e = 1) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = a + e * rng.uniform();
  return x;
}

}  // namespace

TEST_CASE("NullDistribution quantile and p-value") {
  std::vector<double> d(100);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = static_cast<double>(100 - i);
  const NullDistribution null(d);
  CHECK(null.critical_value(0.05) == 95.0);
  CHECK(null.critical_value(0.10) == 90.0);
  CHECK(null.p_value(100.5) == doctest::Approx(1.0 / 101));
  CHECK(null.p_value(0.0) == 1.0);
  CHECK(null.p_value(95.0) == doctest::Approx(7.0 / 101));
  CHECK_THROWS_AS(null.critical_value(0.0), DomainError);
  CHECK_THROWS_AS(null.critical_value(1.0), DomainError);
}

TEST_CASE("critical_value preconditions and monotonicity") {
  CHECK_THROWS_AS(critical_value(1, 1.0, 0.05, 999, 1), DomainError);
  CHECK_THROWS_AS(critical_value(1, 1.0, 1.5, 1000, 1), DomainError);
  CHECK_THROWS_AS(critical_value(1, 0.1, 0.05, 1000, 1), DomainError);
  const auto null = limit_null(2, 0.5, 2000, 8, 1025);
  CHECK(null.critical_value(0.01) >= null.critical_value(0.10));
  CHECK(critical_value(2, 0.5, 0.05, 2000, 8, 1025) == critical_value(2, 0.5, 0.05, 2000, 8, 1025));
}

TEST_CASE("critical value at R = 1 is the Kolmogorov quantile") {
  const double oracle_q = oracle::kolmogorov_quantile(0.95);
  CHECK(oracle_q == doctest::Approx(1.358).epsilon(1e-3));
  const double cv = critical_value(1, 1.0, 0.05, 100000, 2024, 8193);
  CHECK(std::abs(cv - oracle_q) <= 0.02);
}

TEST_CASE("rescale") {
  const std::vector<double> x{2.5, 3.0, 3.75};
  const auto u = rescale(x, Interval{2.0, 2.0});
  CHECK(u == std::vector<double>{0.25, 0.5, 0.875});
  CHECK_THROWS_AS(rescale(std::vector<double>{4.0}, Interval{2.0, 2.0}), DataError);
  CHECK_THROWS_AS(rescale(std::vector<double>{1.0}, Interval{2.0, 2.0}), DataError);
  CHECK_THROWS_AS(rescale(x, Interval{2.0, 0.0}), DomainError);
}

TEST_CASE("ties in the data are rejected") {
  std::vector<double> x = uniform_sample(1, 600);
  x[10] = x[20];
  TestOptions o;
  o.reps = 1000;
  CHECK_THROWS_AS(ratio_uniformity_test(x, uniform_sample(2, 600), o), DataError);
}

TEST_CASE("equal interval lengths change nothing") {
  const auto x = uniform_sample(3, 1200);
  const auto y = uniform_sample(4, 1200);
  TestOptions o;
  o.reps = 1000;
  o.grid_points = 513;
  const auto base = ratio_uniformity_test(x, y, o);

  std::vector<double> xs(x), ys(y);
  for (double& v : xs) v = 5.0 + 2.0 * v;
  for (double& v : ys) v = -3.0 + 2.0 * v;
  auto shifted = o;
  shifted.interval_x = {5.0, 2.0};
  shifted.interval_y = {-3.0, 2.0};
  const auto moved = ratio_uniformity_test(xs, ys, shifted);
  CHECK(moved.statistic == doctest::Approx(base.statistic).epsilon(1e-12));
  CHECK(moved.critical_value == base.critical_value);
}

TEST_CASE("scale soundness is bit-identical") {
  const auto x = uniform_sample(5, 1100, 1.0, 3.0);
  const auto y = uniform_sample(6, 1300, -2.0, 0.5);
  TestOptions o;
  o.reps = 1000;
  o.grid_points = 257;
  o.interval_x = {1.0, 3.0};
  o.interval_y = {-2.0, 0.5};
  const auto base = ratio_uniformity_test(x, y, o);
  for (double lambda : {0.125, 4.0, 1024.0}) {
    std::vector<double> xs(x), ys(y);
    for (double& v : xs) v *= lambda;
    for (double& v : ys) v *= lambda;
    auto scaled = o;
    scaled.interval_x = {o.interval_x.lower * lambda, o.interval_x.length * lambda};
    scaled.interval_y = {o.interval_y.lower * lambda, o.interval_y.length * lambda};
    const auto r = ratio_uniformity_test(xs, ys, scaled);
    CHECK(r.statistic == base.statistic);
    CHECK(r.p_value == base.p_value);
    CHECK(r.reject == base.reject);
  }
}

TEST_CASE("small designs fall back to the finite-N null") {
  const auto x = uniform_sample(7, 200);
  const auto y = uniform_sample(8, 200);
  TestOptions o;
  o.reps = 1000;
  const auto r = ratio_uniformity_test(x, y, o);
  CHECK(r.null_law == "finite_n");
  CHECK(r.warning.has_value());
  CHECK(r.reject == (r.statistic > r.critical_value));
}

TEST_CASE("null cache round trip") {
  const auto path = (std::filesystem::temp_directory_path() / "mspacings_cache_test.json").string();
  std::filesystem::remove(path);
  double cv = 0;
  {
    NullCache cache(path);
    cv = cache.limit(1, 0.5, 1000, 3, 257, 1).critical_value(0.05);
    cache.save();
  }
  NullCache again(path);
  CHECK(again.size() == 1);
  CHECK(again.limit(1, 0.5, 1000, 3, 257, 1).critical_value(0.05) == cv);
  std::filesystem::remove(path);
}

TEST_CASE("power against a Beta(2,2) alternative") {
  // y from Beta(2, 2) by inversion: the cubic 3u^2 - 2u^3 = p.
  auto beta22 = [](double p) {
    return oracle::bisect([](double u) { return 3 * u * u - 2 * u * u * u; }, p, 0.0, 1.0, 60);
  };
  TestOptions o;
  o.reps = 2000;
  o.grid_points = 2049;
  NullCache cache;
  int rejections = 0;
  const int trials = 40;
  for (int t = 0; t < trials; ++t) {
    const auto x = uniform_sample(derive_seed(100, t), 2000);
    auto y = uniform_sample(derive_seed(200, t), 2000);
    for (double& v : y) v = beta22(v);
    rejections += ratio_uniformity_test(x, y, o, &cache).reject ? 1 : 0;
  }
  MESSAGE("Beta(2,2) rejection rate " << static_cast<double>(rejections) / trials);
  CHECK(rejections > trials / 2);
}
