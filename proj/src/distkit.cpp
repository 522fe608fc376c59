#include "mspacings/distkit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "mspacings/errors.hpp"

namespace mspacings::dist {

namespace {

constexpr int kExactFactorialLimit = 20;
constexpr int kExactOrderLimit = 10;
constexpr int kMaxIterations = 200;
constexpr double kProbabilityTolerance = 1e-12;
constexpr double kEps = std::numeric_limits<double>::epsilon();

constexpr std::array<std::uint64_t, kExactFactorialLimit + 1> make_factorials() {
  std::array<std::uint64_t, kExactFactorialLimit + 1> f{};
  f[0] = 1;
  for (int i = 1; i <= kExactFactorialLimit; ++i) {
    f[i] = f[i - 1] * static_cast<std::uint64_t>(i);
  }
  return f;
}

constexpr auto kFactorials = make_factorials();

void check_unit_interval(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError(std::string(what) + ": argument must lie in [0, 1]");
  }
}

void check_open_unit_interval(double v, const char* what) {
  if (!(v > 0.0 && v < 1.0)) {
    throw DomainError(std::string(what) + ": probability must lie in (0, 1)");
  }
}

// Safeguarded Newton for an increasing residual on [lo, hi].
template <typename Residual, typename Slope>
double solve_increasing(Residual residual, Slope slope, double lo, double hi,
                        double x, const char* what) {
  if (!(x > lo && x < hi)) {
    x = 0.5 * (lo + hi);
  }
  double best = x;
  double best_abs = std::numeric_limits<double>::infinity();
  for (int it = 0; it < kMaxIterations; ++it) {
    const double f = residual(x);
    if (std::abs(f) < best_abs) {
      best_abs = std::abs(f);
      best = x;
    }
    if (f == 0.0) {
      return x;
    }
    if (f > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double d = slope(x);
    double next = (d > 0.0 && std::isfinite(d)) ? x - f / d : lo - 1.0;
    if (!(next > lo && next < hi)) {
      next = 0.5 * (lo + hi);
    }
    const bool tiny_step = std::abs(next - x) <= 2.0 * kEps * std::abs(x);
    const bool tiny_bracket = (hi - lo) <= 2.0 * kEps * std::abs(hi);
    x = next;
    if (tiny_step || tiny_bracket) {
      const double fx = std::abs(residual(x));
      if (fx < best_abs) {
        best_abs = fx;
        best = x;
      }
      break;
    }
  }
  if (!(best_abs <= kProbabilityTolerance)) {
    throw NumericError(std::string(what) + ": quantile inversion did not converge");
  }
  return best;
}

}  // namespace

void check_order(int m) {
  if (m < kMinOrder || m > kMaxOrder) {
    throw DomainError("order m must lie in [1, 20], got " + std::to_string(m));
  }
}

double factorial(int n) {
  if (n < 0) {
    throw DomainError("factorial of a negative integer");
  }
  if (n <= kExactFactorialLimit) {
    return static_cast<double>(kFactorials[static_cast<std::size_t>(n)]);
  }
  return std::exp(std::lgamma(static_cast<double>(n) + 1.0));
}

double log_factorial(int n) {
  if (n < 0) {
    throw DomainError("factorial of a negative integer");
  }
  if (n <= kExactFactorialLimit) {
    return std::log(static_cast<double>(kFactorials[static_cast<std::size_t>(n)]));
  }
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double pochhammer(double a, int n) {
  double p = 1.0;
  for (int i = 0; i < n; ++i) {
    p *= a + i;
  }
  return p;
}

double inv_beta_mm(int m) {
  check_order(m);
  if (m <= kExactOrderLimit) {
    const auto num = kFactorials[static_cast<std::size_t>(2 * m - 1)];
    const auto den = kFactorials[static_cast<std::size_t>(m - 1)];
    return static_cast<double>(num / den / den);
  }
  return std::exp(std::lgamma(2.0 * m) - 2.0 * std::lgamma(static_cast<double>(m)));
}

double beta_tail_constant(int m) {
  check_order(m);
  return pochhammer(0.5, m) / std::ldexp(factorial(m), 1 - 2 * m);
}

// ---------------------------------------------------------------------------
// BetaSymmetric

BetaSymmetric::BetaSymmetric(int m) : m_(m), norm_(0.0), binom_{} {
  check_order(m);
  norm_ = inv_beta_mm(m);
  // Row 2m-1 of Pascal's triangle; C(39, 19) fits comfortably in 64 bits.
  const int n = 2 * m - 1;
  binom_[0] = 1;
  for (int row = 1; row <= n; ++row) {
    for (int j = row; j > 0; --j) {
      binom_[j] = binom_[j] + binom_[j - 1];
    }
  }
}

double BetaSymmetric::lower_half_cdf(double x) const {
  const int n = 2 * m_ - 1;
  const double y = 1.0 - x;
  double sum = 0.0;
  // Terms decrease in j when x <= 1/2, so add from the far end.
  for (int j = n; j >= m_; --j) {
    sum += static_cast<double>(binom_[j]) * std::pow(x, j) * std::pow(y, n - j);
  }
  return sum;
}

double BetaSymmetric::cdf(double x) const {
  check_unit_interval(x, "beta_cdf");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  if (m_ == 1) return x;
  if (x <= 0.5) return lower_half_cdf(x);
  return 1.0 - lower_half_cdf(1.0 - x);
}

double BetaSymmetric::pdf(double x) const {
  check_unit_interval(x, "beta_pdf");
  if (m_ == 1) return 1.0;
  return norm_ * std::pow(x * (1.0 - x), m_ - 1);
}

double BetaSymmetric::quantile(double v) const {
  check_open_unit_interval(v, "beta_quantile");
  if (m_ == 1) return v;
  if (v == 0.5) return 0.5;
  if (v > 0.5) return 1.0 - quantile(1.0 - v);
  const double guess = std::pow(v / beta_tail_constant(m_), 1.0 / m_);
  return solve_increasing([&](double x) { return lower_half_cdf(x) - v; },
                          [&](double x) { return norm_ * std::pow(x * (1.0 - x), m_ - 1); },
                          0.0, 0.5, guess, "beta_quantile");
}

double BetaSymmetric::quantile_density(double v) const {
  return 1.0 / pdf(quantile(v));
}

// ---------------------------------------------------------------------------
// GammaTwoM

GammaTwoM::GammaTwoM(int m) : m_(m), log_norm_(0.0) {
  check_order(m);
  log_norm_ = log_factorial(2 * m - 1);
}

double GammaTwoM::pdf(double x) const {
  if (!(x >= 0.0)) {
    throw DomainError("gamma2m_pdf: argument must be nonnegative");
  }
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 0.0;
  return std::exp((2 * m_ - 1) * std::log(x) - x - log_norm_);
}

double GammaTwoM::sf(double x) const {
  if (!(x >= 0.0)) {
    throw DomainError("gamma2m_cdf: argument must be nonnegative");
  }
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const int k = 2 * m_;
  if (x < k) {
    return 1.0 - cdf(x);
  }
  // e^{-x} sum_{j<2m} x^j / j!
  double term = 1.0;
  double sum = 1.0;
  for (int j = 1; j < k; ++j) {
    term *= x / j;
    sum += term;
  }
  return std::exp(std::log(sum) - x);
}

double GammaTwoM::cdf(double x) const {
  if (!(x >= 0.0)) {
    throw DomainError("gamma2m_cdf: argument must be nonnegative");
  }
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const int k = 2 * m_;
  if (x >= k) {
    return 1.0 - sf(x);
  }
  // e^{-x} sum_{j>=2m} x^j / j!, summed until the tail is negligible.
  double term = std::exp(k * std::log(x) - x - log_factorial(k));
  double sum = term;
  for (int j = k + 1; j < k + 2000; ++j) {
    term *= x / j;
    sum += term;
    if (term <= 1e-17 * sum) break;
  }
  return sum;
}

double GammaTwoM::quantile(double w) const {
  check_open_unit_interval(w, "gamma2m_quantile");
  const int k = 2 * m_;
  if (w < 0.5) {
    const double guess = std::pow(std::exp(log_factorial(k)) * w, 1.0 / k);
    double hi = std::max(guess, 1.0);
    while (cdf(hi) < w) hi *= 2.0;
    return solve_increasing([&](double x) { return cdf(x) - w; },
                            [&](double x) { return pdf(x); }, 0.0, hi, guess,
                            "gamma2m_quantile");
  }
  const double p = 1.0 - w;
  const double guess = std::max(-std::log(p), static_cast<double>(k - 1));
  double lo = 0.0;
  double hi = guess;
  while (sf(hi) > p) {
    lo = hi;
    hi *= 2.0;
  }
  return solve_increasing([&](double x) { return p - sf(x); },
                          [&](double x) { return pdf(x); }, lo, hi, guess,
                          "gamma2m_quantile");
}

double GammaTwoM::quantile_density(double w) const {
  return 1.0 / pdf(quantile(w));
}

// ---------------------------------------------------------------------------
// Free functions

double beta_cdf(int m, double x) { return BetaSymmetric(m).cdf(x); }
double beta_pdf(int m, double x) { return BetaSymmetric(m).pdf(x); }
double beta_quantile(int m, double v) { return BetaSymmetric(m).quantile(v); }
double gamma2m_cdf(int m, double x) { return GammaTwoM(m).cdf(x); }
double gamma2m_sf(int m, double x) { return GammaTwoM(m).sf(x); }
double gamma2m_pdf(int m, double x) { return GammaTwoM(m).pdf(x); }
double gamma2m_quantile(int m, double w) { return GammaTwoM(m).quantile(w); }

double quantile_density(Family family, int m, double u) {
  check_open_unit_interval(u, "quantile_density");
  switch (family) {
    case Family::beta_mm:
      return BetaSymmetric(m).quantile_density(u);
    case Family::gamma_2m:
      return GammaTwoM(m).quantile_density(u);
  }
  throw DomainError("quantile_density: unknown family");
}

double tail_leading_term(TailTerm which, int m, double u) {
  check_order(m);
  check_open_unit_interval(u, "tail_leading_term");
  const double beta_scale = std::pow(beta_tail_constant(m), -1.0 / m);
  const double gamma_scale = std::pow(factorial(2 * m), 1.0 / (2 * m));
  switch (which) {
    case TailTerm::q3_at0:
      return beta_scale * std::pow(u, 1.0 / m - 1.0) / m;
    case TailTerm::q3_at1:
      return beta_scale * std::pow(1.0 - u, 1.0 / m - 1.0) / m;
    case TailTerm::q2_at0:
      return gamma_scale * std::pow(u, 1.0 / (2 * m) - 1.0) / (2 * m);
    case TailTerm::q2_at1:
      return 1.0 / (1.0 - u);
    case TailTerm::Q3_at0:
      return beta_scale * std::pow(u, 1.0 / m);
    case TailTerm::Q3_at1:
      return 1.0 - beta_scale * std::pow(1.0 - u, 1.0 / m);
    case TailTerm::Q2_at0:
      return gamma_scale * std::pow(u, 1.0 / (2 * m));
    case TailTerm::Q2_at1:
      return -std::log1p(-u);
  }
  throw DomainError("tail_leading_term: unknown term");
}

}  // namespace mspacings::dist
