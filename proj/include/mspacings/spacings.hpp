#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mspacings/grid.hpp"

namespace mspacings {

// Sorted sample on (0, 1). Order statistic 0 is the sentinel 0 and order
// statistic n+1 the sentinel 1.
class OrderedSample {
 public:
  // Sorts `values`; throws DataError on ties or values outside (0, 1).
  static OrderedSample from_unsorted(std::vector<double> values);
  // Adopts already sorted values; same checks.
  static OrderedSample from_sorted(std::vector<double> values);

  std::size_t n() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  // X_{i,n} for 0 <= i <= n+1.
  double order_statistic(std::size_t i) const;

 private:
  explicit OrderedSample(std::vector<double> values);

  std::vector<double> values_;
};

// Sizes and pair counts of a two-sample design. N1, N2 are the largest
// numbers of disjoint m-spacing pairs minus one; P, Q are the surpluses.
struct SampleDesign {
  int m = 1;
  long n1 = 0;
  long n2 = 0;
  long N1 = 0;
  long N2 = 0;
  long N = 0;
  long P = 0;
  long Q = 0;

  bool operator==(const SampleDesign&) const = default;
};

// N defaults to min(N1, N2).
SampleDesign design_from_sizes(long n1, long n2, int m, std::optional<long> N = std::nullopt);

// Smallest sample sizes realizing (m, N, P, Q): n1 = m(N+P+1) - 1, etc.
SampleDesign design_from_counts(int m, long N, long P, long Q);

struct DisjointSpacings {
  std::vector<double> values;  // S_k, k = 0..N
  int m = 1;
  std::size_t source_n = 0;
};

// S_k = X_{(k+1)m,n} - X_{km,n}, k = 0..N, with sentinels included.
DisjointSpacings disjoint_spacings(const OrderedSample& sample, int m, long N);

class RatioSample {
 public:
  RatioSample(std::vector<double> ratios, SampleDesign design);

  std::span<const double> ratios() const { return ratios_; }
  // Ratios in increasing order.
  std::span<const double> sorted() const { return sorted_; }
  const SampleDesign& design() const { return design_; }
  std::size_t size() const { return ratios_.size(); }

 private:
  std::vector<double> ratios_;
  std::vector<double> sorted_;
  SampleDesign design_;
};

// R_k = (N1+1) S_{k;X} / ((N1+1) S_{k;X} + (N2+1) S_{k;Y}).
RatioSample spacing_ratios(const DisjointSpacings& sx, const DisjointSpacings& sy,
                           const SampleDesign& design);

// Right-continuous empirical cdf of the ratios.
double empirical_cdf(const RatioSample& ratios, double x);

// sqrt(N+1) (empirical_cdf(x) - H_m(x)) at a single point of [0, 1].
double empirical_process_at(const RatioSample& ratios, double x);

// The empirical process on every grid point.
GridPath empirical_process(const RatioSample& ratios, const Grid& grid);

// sup over [0, 1] of |empirical process|, computed exactly from the jump
// points (both one-sided limits at every ratio).
double empirical_process_sup(const RatioSample& ratios);

// Same supremum after the time change t -> t h / (t h + (1-t) e). The map is
// a bijection of [0, 1], so the value equals empirical_process_sup; it is
// provided for evaluation sets expressed in the mapped coordinates.
double empirical_process_sup_mapped(const RatioSample& ratios, std::span<const double> grid,
                                    double e, double h);

// 1 - (m/(2m+1)) [(N+1)/(N1+1) + (N+1)/(N2+1)].
double r_nm(const SampleDesign& design);

}  // namespace mspacings
