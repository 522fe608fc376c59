#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mspacings/grid.hpp"
#include "mspacings/random.hpp"

namespace mspacings {

// Brownian bridge at increasing times (first 0, last 1) written to `out`.
void fill_bridge(std::span<const double> times, Rng& rng, std::span<double> out);

// Psi(t_i) / sigma_grid^2 where sigma_grid^2 is the trapezoid integral of
// Psi over the grid.
std::vector<double> centering_weights(int m, const Grid& grid);

// Repeated draws of (B o H_m)_C on a fixed grid. Precomputes H_m at the grid
// points and the centering weights once; each draw costs grid.size() - 1
// normal variates.
class LimitSampler {
 public:
  LimitSampler(int m, double C, Grid grid);

  const Grid& grid() const { return grid_; }
  int order() const { return m_; }
  double centering() const { return C_; }

  GridPath sample(std::uint64_t seed) const;
  // Writes a draw into `out` (resized to the grid); returns the trapezoid
  // integral of the uncentered B o H_m.
  double sample_into(std::uint64_t seed, std::vector<double>& out) const;

 private:
  int m_;
  double C_;
  Grid grid_;
  std::vector<double> times_;
  std::vector<double> weights_;
};

}  // namespace mspacings
