#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace mspacings {

// Strictly increasing points in [0, 1] with first point 0 and last point 1.
// Copies share the underlying storage.
class Grid {
 public:
  // `points` equispaced points including both endpoints (points >= 2).
  static Grid uniform(std::size_t points);
  // Validates and adopts arbitrary points.
  static Grid from_points(std::vector<double> points);

  std::span<const double> points() const { return *points_; }
  std::size_t size() const { return points_->size(); }
  double operator[](std::size_t i) const { return (*points_)[i]; }

  bool operator==(const Grid& other) const {
    return points_ == other.points_ || *points_ == *other.points_;
  }

 private:
  explicit Grid(std::shared_ptr<const std::vector<double>> points)
      : points_(std::move(points)) {}

  std::shared_ptr<const std::vector<double>> points_;
};

// Real values carried on a Grid: sample paths of bridges, limit processes
// and the ratio empirical process.
class GridPath {
 public:
  GridPath(Grid grid, std::vector<double> values);

  static GridPath zero(Grid grid);

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  double sup_abs() const;
  // Trapezoid rule on the path's own grid.
  double integral() const;
  // Linear interpolation between grid points.
  double at(double t) const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

// Trapezoid rule for values sampled on `grid`.
double trapezoid(const Grid& grid, std::span<const double> values);

}  // namespace mspacings
