#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mspacings/gausslim.hpp"
#include "mspacings/grid.hpp"
#include "mspacings/spacings.hpp"

namespace mspacings::verify {

// One realization of the exponential representation of two independent
// uniform samples. zeta and xi are unit exponentials; Z_k (resp. Z'_k) sums
// zeta (resp. xi) over the k-th block of m indices.
struct RepresentationDraw {
  int m = 1;
  long N = 0;
  long P = 0;
  long Q = 0;

  std::vector<double> z;       // Z_k, k = 0..N+P
  std::vector<double> zprime;  // Z'_k, k = 0..N+Q
  double t_x = 0.0;            // sum_{k<=N} Z_k
  double r_x = 0.0;            // sum_{N<k<=N+P} Z_k
  double t_y = 0.0;
  double r_y = 0.0;

  double delta_n = 0.0;  // mean of Z_k - Z'_k over k <= N
  double theta_n = 0.0;  // mean of Z_k + Z'_k - 2m over k <= N
  double q_n = 0.0;      // normalized odds deviation of the two block totals
  double d_n = 0.0;      // q_n corrected by the linear terms in delta_n, theta_n

  std::vector<double> ratios;  // R_k = Z_k / (Z_k + Z'_k), k = 0..N
  std::vector<double> v;       // V_k = H_m(R_k)

  // Data-dependent time change {1 + (1/t - 1)(1 + q_n)}^{-1}.
  double tau(double t) const;
  // Spacing ratio of the two samples rebuilt from the representation:
  // S_{k;X} = Z_k / (t_x + r_x), S_{k;Y} = Z'_k / (t_y + r_y).
  double sample_ratio(std::size_t k) const;
};

RepresentationDraw representation_draw(int m, long N, long P, long Q, std::uint64_t seed);

// Explicit stream seeds for the zeta and xi sequences. Equal seeds with
// P == Q give identical blocks.
RepresentationDraw representation_draw(int m, long N, long P, long Q, std::uint64_t zeta_seed,
                                       std::uint64_t xi_seed);

// ---------------------------------------------------------------------------
// Functional sampling

// Ratio empirical process built from fresh uniform samples of the design.
struct GammaNSource {
  SampleDesign design;
};
// (B o H_m)_C.
struct LimitSource {
  int m = 1;
  double C = 0.0;
};
// B o H_m.
struct BridgeComposedSource {
  int m = 1;
};
// Identically zero paths; exercises the plumbing.
struct ZeroSource {};

using Source = std::variant<GammaNSource, LimitSource, BridgeComposedSource, ZeroSource>;

enum class FunctionalKind { sup_abs, integral, eval_at };

struct Functional {
  FunctionalKind kind = FunctionalKind::sup_abs;
  double at = 0.5;  // eval_at only

  // "sup_abs", "integral" or "eval_at:<t>".
  static Functional parse(const std::string& text);
  std::string to_string() const;
};

std::string describe(const Source& source);

// One functional value per replicate; replicate i uses
// derive_seed(master_seed, i), so the sample does not depend on `threads`.
std::vector<double> mc_functional(const Source& source, const Functional& functional,
                                  std::size_t reps, const Grid& grid, std::uint64_t master_seed,
                                  int threads = 1);

// Two-sample Kolmogorov-Smirnov distance.
double ks_statistic(std::span<const double> a, std::span<const double> b);

// ---------------------------------------------------------------------------
// Covariance and quadrature oracles

struct CovarianceReport {
  std::vector<std::size_t> probes;
  std::vector<double> matrix;  // probes.size()^2, row-major
  double max_abs_error = 0.0;  // against the kernel at the probe times

  double at(std::size_t i, std::size_t j) const { return matrix[i * probes.size() + j]; }
};

// Unbiased sample covariance of the paths at the probe grid indices.
CovarianceReport empirical_covariance(std::span<const GridPath> paths,
                                      std::span<const std::size_t> probes,
                                      const CenteredKernel& kernel);

struct QuadratureOracles {
  std::optional<double> psi_quad;
  double sigma2_quad = 0.0;
};

// Psi(t) and sigma^2 by adaptive Simpson on their defining integrals of the
// bridge kernel H_m(s ^ t) - H_m(s) H_m(t); independent of the closed forms.
QuadratureOracles quadrature_oracles(int m, std::optional<double> t = std::nullopt);

// ---------------------------------------------------------------------------
// Experiments

struct ExperimentConfig {
  int m = 1;
  std::optional<long> n1;
  std::optional<long> n2;
  std::optional<long> N;
  std::optional<long> P;
  std::optional<long> Q;
  std::optional<Extended> c;
  std::optional<Extended> d;
  std::size_t grid_points = 4097;
  std::size_t reps = 2000;
  Functional functional;
  std::uint64_t seed = 0;
  int threads = 1;

  double ks_tolerance = 0.07;
  double variance_tolerance = 0.10;
  double d_ratio_tolerance = 0.05;
  std::size_t event_reps = 100;
  std::size_t event_points = 50;
  // Replicates for the representation-based variance checks; 0 uses reps.
  std::size_t variance_reps = 0;
};

// Design implied by the config: explicit sizes, or (N, P, Q) with P, Q
// taken from finite c, d as round(c (N+1)) when not given.
SampleDesign resolve_design(const ExperimentConfig& config);

struct SampleSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
  double min = 0.0;
  double median = 0.0;
  double q95 = 0.0;
  double max = 0.0;
};

SampleSummary summarize(std::span<const double> sample);

// Unbiased sample variance.
double sample_variance(std::span<const double> sample);

struct VarianceCheck {
  std::string name;
  double estimate = 0.0;
  double target = 0.0;
  double relative_error = 0.0;
  double tolerance = 0.0;
  std::string criterion;
  bool pass = false;
};

struct EventIdentityCheck {
  std::size_t replicates = 0;
  std::size_t t_values = 0;
  std::size_t comparisons = 0;
  std::size_t mismatches = 0;
  bool pass = false;
};

struct MCReport {
  ExperimentConfig config;
  SampleDesign design;
  double r_value = 0.0;
  double centering = 0.0;
  std::string limit_source;
  std::vector<double> gamma_sample;
  std::vector<double> limit_sample;
  double ks = 0.0;
  bool ks_pass = false;
  std::vector<VarianceCheck> variance_checks;
  EventIdentityCheck event_identity;
  bool pass = false;
  double wall_clock_seconds = 0.0;
};

MCReport run_experiment(const ExperimentConfig& config);

// Event identity {R_k <= t} = {V_k <= H_m(tau(t))} checked exactly on
// `replicates` representation draws and `t_values` random t per draw.
EventIdentityCheck check_event_identity(int m, long N, long P, long Q, std::size_t replicates,
                                        std::size_t t_values, std::uint64_t seed);

// Variances of sqrt(N+1) theta_n, q_n and d_n over `reps` draws.
struct RepresentationMoments {
  double var_theta = 0.0;
  double var_delta = 0.0;
  double var_q = 0.0;
  double var_d = 0.0;
  double mean_theta = 0.0;
};

RepresentationMoments representation_moments(int m, long N, long P, long Q, std::size_t reps,
                                             std::uint64_t seed, int threads = 1);

}  // namespace mspacings::verify
