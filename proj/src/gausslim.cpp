#include "mspacings/gausslim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mspacings/distkit.hpp"
#include "mspacings/errors.hpp"
#include "mspacings/limit_sampler.hpp"
#include "mspacings/random.hpp"

namespace mspacings {

Extended Extended::finite(double value) {
  if (!(value >= 0.0)) {
    throw DomainError("regime constants must be nonnegative");
  }
  if (std::isinf(value)) return infinity();
  return Extended(value);
}

Extended Extended::parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf" || text == "oo") {
    return infinity();
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw DomainError("cannot parse '" + text + "' as a nonnegative number or inf");
  }
  if (used != text.size()) {
    throw DomainError("cannot parse '" + text + "' as a nonnegative number or inf");
  }
  return finite(v);
}

double Extended::value() const {
  return infinite_ ? std::numeric_limits<double>::infinity() : value_;
}

double Extended::inv_one_plus() const { return infinite_ ? 0.0 : 1.0 / (1.0 + value_); }

std::string Extended::to_string() const {
  if (infinite_) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << value_;
  return os.str();
}

// ---------------------------------------------------------------------------

GridPath simulate_bridge(const Grid& grid, std::uint64_t seed) {
  const auto pts = grid.points();
  std::vector<double> values(pts.size());
  Rng rng(seed);
  fill_bridge(pts, rng, values);
  return GridPath(grid, std::move(values));
}

GridPath simulate_bridge_composed(int m, const Grid& grid, std::uint64_t seed) {
  return LimitSampler(m, 0.0, grid).sample(seed);
}

double psi_coefficient(int m) { return dist::inv_beta_mm(m) / (2.0 * m); }

double psi(int m, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError("psi: argument must lie in [0, 1]");
  }
  return psi_coefficient(m) * std::pow(t * (1.0 - t), m);
}

double sigma2_bh(int m) {
  dist::check_order(m);
  return 1.0 / (4.0 * (2.0 * m + 1.0));
}

double CenteredKernel::operator()(double s, double t) const {
  if (!(s >= 0.0 && s <= 1.0 && t >= 0.0 && t <= 1.0)) {
    throw DomainError("kernel arguments must lie in [0, 1]");
  }
  const dist::BetaSymmetric law(m);
  const double hs = law.cdf(s);
  const double ht = law.cdf(t);
  const double a = psi_coefficient(m);
  const double bridge = std::min(hs, ht) - hs * ht;
  // C^2 - 2C written as (C-1)^2 - 1 so that C and 2-C give the same bits.
  const double offset = C - 1.0;
  const double shift = 4.0 * (2.0 * m + 1.0) * (offset * offset - 1.0) * a * a *
                       std::pow((s * (1.0 - s)) * (t * (1.0 - t)), m);
  return bridge + shift;
}

double kernel_kc(int m, double C, double s, double t) { return CenteredKernel{m, C}(s, t); }

GridPath apply_jc(const GridPath& path, double C, int m) {
  const auto& grid = path.grid();
  if (grid.size() < 3) {
    throw DomainError("J_C needs a grid of at least 3 points");
  }
  const auto weights = centering_weights(m, grid);
  const double integral = path.integral();
  std::vector<double> out(path.values().begin(), path.values().end());
  if (C != 0.0) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] -= C * weights[i] * integral;
    }
  }
  return GridPath(grid, std::move(out));
}

GridPath simulate_limit_path(int m, double C, const Grid& grid, std::uint64_t seed) {
  return LimitSampler(m, C, grid).sample(seed);
}

RegimeParams regime(int m, Extended c, Extended d) {
  dist::check_order(m);
  RegimeParams r;
  r.m = m;
  r.c = c;
  r.d = d;
  r.r_infinity = 1.0 - (m / (2.0 * m + 1.0)) * (c.inv_one_plus() + d.inv_one_plus());
  const double root = std::sqrt(r.r_infinity);
  r.c_plus = 1.0 + root;
  r.c_minus = 1.0 - root;
  return r;
}

double centering_coefficient(int m, double C) {
  return 4.0 * (2.0 * m + 1.0) * psi_coefficient(m) * C;
}

AsymptoticVariances asymptotic_variances(int m, Extended c, Extended d) {
  dist::check_order(m);
  auto spread = [](Extended x) {
    if (x.is_infinite()) return 0.0;
    const double v = x.value();
    return v / ((1.0 + v) * (1.0 + v));
  };
  AsymptoticVariances out;
  out.sigma1_sq = (spread(c) + spread(d)) / m;
  out.sigma2_sq = (c.inv_one_plus() + d.inv_one_plus()) / m;
  return out;
}

}  // namespace mspacings
