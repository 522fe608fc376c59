#include "mspacings/limit_sampler.hpp"

#include <cmath>

#include "mspacings/distkit.hpp"
#include "mspacings/errors.hpp"
#include "mspacings/gausslim.hpp"

namespace mspacings {

void fill_bridge(std::span<const double> times, Rng& rng, std::span<double> out) {
  const std::size_t n = times.size();
  if (n < 2 || out.size() != n) {
    throw DomainError("bridge needs at least 2 times and a matching output");
  }
  double w = 0.0;
  out[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    w += std::sqrt(times[i] - times[i - 1]) * rng.normal();
    out[i] = w;
  }
  const double end = out[n - 1];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    out[i] -= times[i] * end;
  }
  out[n - 1] = 0.0;
}

std::vector<double> centering_weights(int m, const Grid& grid) {
  const auto pts = grid.points();
  std::vector<double> w(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) w[i] = psi(m, pts[i]);
  const double norm = trapezoid(grid, w);
  for (double& x : w) x /= norm;
  return w;
}

LimitSampler::LimitSampler(int m, double C, Grid grid) : m_(m), C_(C), grid_(std::move(grid)) {
  dist::check_order(m);
  if (grid_.size() < 3) {
    throw DomainError("limit paths need a grid of at least 3 points");
  }
  const dist::BetaSymmetric law(m);
  const auto pts = grid_.points();
  times_.resize(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) times_[i] = law.cdf(pts[i]);
  weights_ = centering_weights(m, grid_);
}

double LimitSampler::sample_into(std::uint64_t seed, std::vector<double>& out) const {
  out.resize(times_.size());
  Rng rng(seed);
  fill_bridge(times_, rng, out);
  const double integral = trapezoid(grid_, out);
  if (C_ != 0.0) {
    const double shift = C_ * integral;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= shift * weights_[i];
  }
  return integral;
}

GridPath LimitSampler::sample(std::uint64_t seed) const {
  std::vector<double> values;
  sample_into(seed, values);
  return GridPath(grid_, std::move(values));
}

}  // namespace mspacings
