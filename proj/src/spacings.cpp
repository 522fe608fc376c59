#include "mspacings/spacings.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mspacings/distkit.hpp"
#include "mspacings/errors.hpp"

namespace mspacings {

namespace {

void validate_sorted(const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0 && v[i] < 1.0)) {
      throw DataError("sample value outside the open interval (0, 1)");
    }
    if (i > 0) {
      if (v[i] == v[i - 1]) {
        throw DataError("tied sample values; ties have probability zero under the model");
      }
      if (v[i] < v[i - 1]) {
        throw DataError("sample is not sorted");
      }
    }
  }
}

}  // namespace

OrderedSample::OrderedSample(std::vector<double> values) : values_(std::move(values)) {
  validate_sorted(values_);
}

OrderedSample OrderedSample::from_unsorted(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return OrderedSample(std::move(values));
}

OrderedSample OrderedSample::from_sorted(std::vector<double> values) {
  return OrderedSample(std::move(values));
}

double OrderedSample::order_statistic(std::size_t i) const {
  if (i == 0) return 0.0;
  if (i == values_.size() + 1) return 1.0;
  if (i > values_.size() + 1) {
    throw DomainError("order statistic index out of range");
  }
  return values_[i - 1];
}

SampleDesign design_from_sizes(long n1, long n2, int m, std::optional<long> N) {
  if (n1 < 1 || n2 < 1) {
    throw DomainError("sample sizes must be positive");
  }
  dist::check_order(m);
  if (m > std::min(n1, n2) + 1) {
    throw DomainError("order m exceeds min(n1, n2) + 1");
  }
  SampleDesign d;
  d.m = m;
  d.n1 = n1;
  d.n2 = n2;
  d.N1 = (n1 + 1) / m - 1;
  d.N2 = (n2 + 1) / m - 1;
  const long max_n = std::min(d.N1, d.N2);
  if (N) {
    if (*N < 0 || *N > max_n) {
      throw DomainError("pair count N=" + std::to_string(*N) + " outside [0, " +
                        std::to_string(max_n) + "]");
    }
    d.N = *N;
  } else {
    d.N = max_n;
  }
  d.P = d.N1 - d.N;
  d.Q = d.N2 - d.N;
  return d;
}

SampleDesign design_from_counts(int m, long N, long P, long Q) {
  dist::check_order(m);
  if (N < 0 || P < 0 || Q < 0) {
    throw DomainError("N, P and Q must be nonnegative");
  }
  const long n1 = static_cast<long>(m) * (N + P + 1) - 1;
  const long n2 = static_cast<long>(m) * (N + Q + 1) - 1;
  return design_from_sizes(n1, n2, m, N);
}

DisjointSpacings disjoint_spacings(const OrderedSample& sample, int m, long N) {
  dist::check_order(m);
  if (N < 0) {
    throw DomainError("pair count must be nonnegative");
  }
  const auto n = sample.n();
  if (static_cast<std::size_t>(N + 1) * static_cast<std::size_t>(m) > n + 1) {
    throw DomainError("(N+1) m exceeds n+1: not enough order statistics");
  }
  DisjointSpacings s;
  s.m = m;
  s.source_n = n;
  s.values.resize(static_cast<std::size_t>(N + 1));
  const auto step = static_cast<std::size_t>(m);
  for (std::size_t k = 0; k <= static_cast<std::size_t>(N); ++k) {
    s.values[k] = sample.order_statistic((k + 1) * step) - sample.order_statistic(k * step);
  }
  return s;
}

RatioSample::RatioSample(std::vector<double> ratios, SampleDesign design)
    : ratios_(std::move(ratios)), sorted_(ratios_), design_(design) {
  for (double r : ratios_) {
    if (!(r > 0.0 && r < 1.0)) {
      throw DataError("spacing ratio outside (0, 1)");
    }
  }
  std::sort(sorted_.begin(), sorted_.end());
}

RatioSample spacing_ratios(const DisjointSpacings& sx, const DisjointSpacings& sy,
                           const SampleDesign& design) {
  const auto count = static_cast<std::size_t>(design.N + 1);
  if (sx.values.size() != count || sy.values.size() != count) {
    throw DomainError("spacing sequences must both hold N+1 values");
  }
  const double wx = static_cast<double>(design.N1 + 1);
  const double wy = static_cast<double>(design.N2 + 1);
  std::vector<double> r(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double a = wx * sx.values[k];
    const double b = wy * sy.values[k];
    r[k] = a / (a + b);
  }
  return RatioSample(std::move(r), design);
}

double empirical_cdf(const RatioSample& ratios, double x) {
  const auto s = ratios.sorted();
  const auto count = std::upper_bound(s.begin(), s.end(), x) - s.begin();
  return static_cast<double>(count) / static_cast<double>(s.size());
}

double empirical_process_at(const RatioSample& ratios, double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("empirical process is defined on [0, 1]");
  }
  const double root = std::sqrt(static_cast<double>(ratios.size()));
  return root * (empirical_cdf(ratios, x) - dist::beta_cdf(ratios.design().m, x));
}

GridPath empirical_process(const RatioSample& ratios, const Grid& grid) {
  const dist::BetaSymmetric law(ratios.design().m);
  const auto s = ratios.sorted();
  const double count = static_cast<double>(s.size());
  const double root = std::sqrt(count);
  const auto pts = grid.points();
  std::vector<double> values(pts.size());
  std::size_t below = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (below < s.size() && s[below] <= pts[i]) ++below;
    values[i] = root * (static_cast<double>(below) / count - law.cdf(pts[i]));
  }
  return GridPath(grid, std::move(values));
}

double empirical_process_sup(const RatioSample& ratios) {
  const dist::BetaSymmetric law(ratios.design().m);
  const auto s = ratios.sorted();
  const double count = static_cast<double>(s.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double h = law.cdf(s[i]);
    const double after = static_cast<double>(i + 1) / count - h;
    const double before = h - static_cast<double>(i) / count;
    sup = std::max({sup, after, before});
  }
  return std::sqrt(count) * sup;
}

double empirical_process_sup_mapped(const RatioSample& ratios, std::span<const double> grid,
                                    double e, double h) {
  if (!(e > 0.0 && h > 0.0)) {
    throw DomainError("interval lengths must be positive");
  }
  auto map = [e, h](double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * h / (t * h + (1.0 - t) * e);
  };
  double sup = 0.0;
  for (double t : grid) {
    sup = std::max(sup, std::abs(empirical_process_at(ratios, map(t))));
  }
  // Jump points carry the one-sided extremes that a grid can miss.
  return std::max(sup, empirical_process_sup(ratios));
}

double r_nm(const SampleDesign& design) {
  const double m = design.m;
  const double n = static_cast<double>(design.N + 1);
  return 1.0 - (m / (2.0 * m + 1.0)) *
                   (n / static_cast<double>(design.N1 + 1) + n / static_cast<double>(design.N2 + 1));
}

}  // namespace mspacings
