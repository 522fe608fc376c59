#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mspacings/spacings.hpp"

namespace mspacings::stest {

// Open interval (lower, lower + length) declared for a sample.
struct Interval {
  double lower = 0.0;
  double length = 1.0;
};

// Sorted simulated draws of the sup statistic under the null.
class NullDistribution {
 public:
  explicit NullDistribution(std::vector<double> draws);

  std::span<const double> sorted() const { return sorted_; }
  std::size_t reps() const { return sorted_.size(); }
  // Empirical (1 - alpha)-quantile: sorted[ceil((1 - alpha) reps) - 1].
  double critical_value(double alpha) const;
  // (1 + #{draws >= statistic}) / (reps + 1).
  double p_value(double statistic) const;

 private:
  std::vector<double> sorted_;
};

inline constexpr std::size_t kMinNullReps = 1000;
inline constexpr std::size_t kDefaultNullGrid = 4097;
// Smallest N for which the limit law is used as the null.
inline constexpr long kMinLimitN = 500;

// sup|(B o H_m)_C| with C = 1 + sqrt(R) over `reps` grid paths.
NullDistribution limit_null(int m, double R, std::size_t reps, std::uint64_t seed,
                            std::size_t grid_points = kDefaultNullGrid, int threads = 1);

// sup|gamma_N| simulated from uniform samples of the actual design.
NullDistribution finite_null(const SampleDesign& design, std::size_t reps, std::uint64_t seed,
                             int threads = 1);

double critical_value(int m, double R, double alpha, std::size_t reps, std::uint64_t seed,
                      std::size_t grid_points = kDefaultNullGrid, int threads = 1);

// Null draws keyed by their parameters, optionally persisted as one JSON file.
class NullCache {
 public:
  NullCache() = default;
  // Loads `path` if it exists; save() writes back to it.
  explicit NullCache(std::string path);

  const NullDistribution& limit(int m, double R, std::size_t reps, std::uint64_t seed,
                                std::size_t grid_points, int threads);
  const NullDistribution& finite(const SampleDesign& design, std::size_t reps,
                                 std::uint64_t seed, int threads);
  void save() const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::optional<std::string> path_;
  std::map<std::string, NullDistribution> entries_;
};

struct TestOptions {
  int m = 1;
  double alpha = 0.05;
  std::size_t reps = 10000;
  std::uint64_t seed = 0;
  std::size_t grid_points = kDefaultNullGrid;
  int threads = 1;
  Interval interval_x;
  Interval interval_y;
};

struct TestResult {
  double statistic = 0.0;
  double critical_value = 0.0;
  double p_value = 1.0;
  bool reject = false;
  std::size_t mc_reps = 0;
  SampleDesign design;
  double r_value = 0.0;
  std::string null_law;  // "limit" or "finite_n"
  std::optional<std::string> warning;
  TestOptions options;
};

// Rescales both samples to (0, 1); DataError when a value falls outside its
// declared interval or after rescaling.
std::vector<double> rescale(std::span<const double> sample, const Interval& interval);

// sup|gamma_N| after rescaling, with the design it was computed on.
struct Statistic {
  double value = 0.0;
  SampleDesign design;
};

Statistic test_statistic(std::span<const double> x, std::span<const double> y,
                         const TestOptions& options);

TestResult ratio_uniformity_test(std::span<const double> x, std::span<const double> y,
                                 const TestOptions& options, NullCache* cache = nullptr);

}  // namespace mspacings::stest
