#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include "mspacings/grid.hpp"

namespace mspacings {

// Nonnegative real or +infinity. Used for the limiting ratios c and d.
class Extended {
 public:
  static Extended finite(double value);
  static Extended infinity() { return Extended(); }
  // Accepts a decimal number, "inf" or "infinity".
  static Extended parse(const std::string& text);

  bool is_infinite() const { return infinite_; }
  double value() const;
  // 1 / (1 + x), with 1 / inf = 0.
  double inv_one_plus() const;
  std::string to_string() const;

  bool operator==(const Extended&) const = default;

 private:
  Extended() = default;
  explicit Extended(double v) : infinite_(false), value_(v) {}

  bool infinite_ = true;
  double value_ = 0.0;
};

// Brownian bridge at the grid points: cumulated Gaussian increments W,
// then B(t) = W(t) - t W(1). Endpoints are exactly zero.
GridPath simulate_bridge(const Grid& grid, std::uint64_t seed);

// B(H_m(t)) on the grid: the bridge is simulated at the times H_m(t_i).
GridPath simulate_bridge_composed(int m, const Grid& grid, std::uint64_t seed);

// (2m-1)! / (2m ((m-1)!)^2).
double psi_coefficient(int m);

// Psi(t) = psi_coefficient(m) (t(1-t))^m: integral over s of the covariance
// of B(H_m(s)) and B(H_m(t)).
double psi(int m, double t);

// Variance of the path integral of B o H_m: 1 / (4(2m+1)).
double sigma2_bh(int m);

// Covariance of the mean-centered process (B o H_m)_C.
struct CenteredKernel {
  int m = 1;
  double C = 0.0;

  double operator()(double s, double t) const;
};

double kernel_kc(int m, double C, double s, double t);

// J_C: path - C Psi(t) / sigma^2 * integral(path). Both integrals use the
// trapezoid rule on the path's grid, so the normalizing sigma^2 is the
// trapezoid integral of Psi on that grid. With that choice the operator
// identities (J_A J_B = J_{A+B-AB}, inverses, J_1 absorbing) hold to
// round-off rather than to quadrature error.
GridPath apply_jc(const GridPath& path, double C, int m);

// J_C applied to a freshly simulated B o H_m.
GridPath simulate_limit_path(int m, double C, const Grid& grid, std::uint64_t seed);

struct RegimeParams {
  int m = 1;
  Extended c = Extended::finite(0.0);
  Extended d = Extended::finite(0.0);
  double r_infinity = 0.0;
  double c_plus = 0.0;
  double c_minus = 0.0;
};

// R = 1 - (m/(2m+1)) [1/(1+c) + 1/(1+d)], C± = 1 ± sqrt(R).
RegimeParams regime(int m, Extended c, Extended d);

// Centering constant applied to (t(1-t))^m times the path integral:
// C Psi(t) / sigma^2 / (t(1-t))^m = 4(2m+1) psi_coefficient(m) C.
double centering_coefficient(int m, double C);

struct AsymptoticVariances {
  double sigma1_sq = 0.0;
  double sigma2_sq = 0.0;
};

// sigma1^2 = (1/m)[c/(1+c)^2 + d/(1+d)^2], sigma2^2 = (1/m)[1/(1+c) + 1/(1+d)],
// infinite terms contributing zero.
AsymptoticVariances asymptotic_variances(int m, Extended c, Extended d);

}  // namespace mspacings
