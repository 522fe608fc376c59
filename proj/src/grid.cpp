#include "mspacings/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mspacings/errors.hpp"

namespace mspacings {

Grid Grid::uniform(std::size_t points) {
  if (points < 2) {
    throw DomainError("grid needs at least 2 points");
  }
  std::vector<double> p(points);
  const double step = 1.0 / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    p[i] = static_cast<double>(i) * step;
  }
  p.back() = 1.0;
  return Grid(std::make_shared<const std::vector<double>>(std::move(p)));
}

Grid Grid::from_points(std::vector<double> points) {
  if (points.size() < 2) {
    throw DomainError("grid needs at least 2 points");
  }
  if (points.front() != 0.0 || points.back() != 1.0) {
    throw DomainError("grid must start at 0 and end at 1");
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i] > points[i - 1])) {
      throw DomainError("grid must be strictly increasing");
    }
  }
  return Grid(std::make_shared<const std::vector<double>>(std::move(points)));
}

GridPath::GridPath(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw DomainError("path has " + std::to_string(values_.size()) +
                      " values for a grid of " + std::to_string(grid_.size()) + " points");
  }
}

GridPath GridPath::zero(Grid grid) {
  const std::size_t n = grid.size();
  return GridPath(std::move(grid), std::vector<double>(n, 0.0));
}

double GridPath::sup_abs() const {
  double s = 0.0;
  for (double v : values_) s = std::max(s, std::abs(v));
  return s;
}

double GridPath::integral() const { return trapezoid(grid_, values_); }

double GridPath::at(double t) const {
  const auto pts = grid_.points();
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError("path evaluation outside [0, 1]");
  }
  const auto it = std::upper_bound(pts.begin(), pts.end(), t);
  if (it == pts.end()) return values_.back();
  const auto hi = static_cast<std::size_t>(it - pts.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - pts[lo]) / (pts[hi] - pts[lo]);
  return (1.0 - w) * values_[lo] + w * values_[hi];
}

double trapezoid(const Grid& grid, std::span<const double> values) {
  const auto pts = grid.points();
  if (values.size() != pts.size()) {
    throw DomainError("trapezoid: value count does not match grid");
  }
  double sum = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    sum += 0.5 * (pts[i] - pts[i - 1]) * (values[i] + values[i - 1]);
  }
  return sum;
}

}  // namespace mspacings
