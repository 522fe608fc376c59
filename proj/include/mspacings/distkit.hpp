#pragma once

#include <cstdint>

namespace mspacings::dist {

// Orders supported by the finite-sum distribution functions.
inline constexpr int kMinOrder = 1;
inline constexpr int kMaxOrder = 20;

// Throws DomainError unless kMinOrder <= m <= kMaxOrder.
void check_order(int m);

// n! for 0 <= n <= 40. Exact for n <= 20, log-space above.
double factorial(int n);
double log_factorial(int n);

// Pochhammer symbol (a)_n = a (a+1) ... (a+n-1).
double pochhammer(double a, int n);

// 1 / beta(m, m) = (2m-1)! / ((m-1)!)^2.
double inv_beta_mm(int m);

// Symmetric Beta(m, m) law on [0, 1]. Evaluation uses the finite binomial
// sum, so cdf values are exact up to floating round-off.
class BetaSymmetric {
 public:
  explicit BetaSymmetric(int m);

  int order() const { return m_; }

  double cdf(double x) const;
  double pdf(double x) const;
  // Bracketed Newton with bisection fallback; |cdf(q) - v| <= 1e-12.
  double quantile(double v) const;
  double quantile_density(double v) const;

 private:
  // P(Bin(2m-1, x) >= m) for x <= 1/2, summed from the small tail.
  double lower_half_cdf(double x) const;

  int m_;
  double norm_;
  std::uint64_t binom_[2 * kMaxOrder];
};

// Gamma(2m, 1) law on [0, inf).
class GammaTwoM {
 public:
  explicit GammaTwoM(int m);

  int order() const { return m_; }
  int shape() const { return 2 * m_; }

  double cdf(double x) const;
  // Upper tail 1 - cdf(x), computed without cancellation.
  double sf(double x) const;
  double pdf(double x) const;
  double quantile(double w) const;
  double quantile_density(double w) const;

 private:
  int m_;
  double log_norm_;  // log Gamma(2m)
};

double beta_cdf(int m, double x);
double beta_pdf(int m, double x);
double beta_quantile(int m, double v);
double gamma2m_cdf(int m, double x);
double gamma2m_sf(int m, double x);
double gamma2m_pdf(int m, double x);
double gamma2m_quantile(int m, double w);

enum class Family { beta_mm, gamma_2m };

// q(u) = 1 / pdf(quantile(u)).
double quantile_density(Family family, int m, double u);

// Leading-order tail approximations of the quantile function (Q*) and the
// quantile density (q*) near 0 and 1. q3/Q3 refer to Beta(m,m), q2/Q2 to
// Gamma(2m,1).
enum class TailTerm {
  q3_at0,
  q3_at1,
  q2_at0,
  q2_at1,
  Q3_at0,
  Q3_at1,
  Q2_at0,
  Q2_at1,
};

double tail_leading_term(TailTerm which, int m, double u);

// (1/2)_m / (2^{1-2m} m!), the constant of the Beta(m,m) cdf near 0:
// H_m(y) ~ beta_tail_constant(m) y^m.
double beta_tail_constant(int m);

}  // namespace mspacings::dist
