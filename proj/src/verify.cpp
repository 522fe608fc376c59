#include "mspacings/verify.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <mutex>
#include <cmath>
#include <sstream>

#include "mspacings/distkit.hpp"
#include "mspacings/errors.hpp"
#include "mspacings/limit_sampler.hpp"
#include "mspacings/parallel.hpp"
#include "mspacings/quadrature.hpp"
#include "mspacings/random.hpp"

namespace mspacings::verify {

namespace {

// Stream indices under a master seed.
enum Stream : std::uint64_t {
  kZetaStream = 0,
  kXiStream = 1,
  kGammaStream = 11,
  kLimitStream = 12,
  kMomentStream = 13,
  kEventStream = 14,
  kEventTimes = 15,
};

void fill_blocks(Rng& rng, int m, std::vector<double>& out) {
  for (double& z : out) {
    double s = 0.0;
    for (int l = 0; l < m; ++l) s += rng.exponential();
    z = s;
  }
}

RepresentationDraw draw_blocks(int m, long N, long P, long Q, std::uint64_t zeta_seed,
                               std::uint64_t xi_seed, bool with_ratios) {
  dist::check_order(m);
  if (N < 0 || P < 0 || Q < 0) {
    throw DomainError("representation_draw: N, P and Q must be nonnegative");
  }
  RepresentationDraw d;
  d.m = m;
  d.N = N;
  d.P = P;
  d.Q = Q;
  d.z.resize(static_cast<std::size_t>(N + P + 1));
  d.zprime.resize(static_cast<std::size_t>(N + Q + 1));
  Rng zeta(zeta_seed);
  Rng xi(xi_seed);
  fill_blocks(zeta, m, d.z);
  fill_blocks(xi, m, d.zprime);

  const auto head = static_cast<std::size_t>(N + 1);
  double diff = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < head; ++k) {
    d.t_x += d.z[k];
    d.t_y += d.zprime[k];
    diff += d.z[k] - d.zprime[k];
    total += d.z[k] + d.zprime[k] - 2.0 * m;
  }
  for (std::size_t k = head; k < d.z.size(); ++k) d.r_x += d.z[k];
  for (std::size_t k = head; k < d.zprime.size(); ++k) d.r_y += d.zprime[k];

  const double n1 = static_cast<double>(N + 1);
  d.delta_n = diff / n1;
  d.theta_n = total / n1;
  const double np = static_cast<double>(N + P + 1);
  const double nq = static_cast<double>(N + Q + 1);
  d.q_n = ((d.t_y + d.r_y) / nq) / ((d.t_x + d.r_x) / np) - 1.0;
  const double a = n1 / np;
  const double b = n1 / nq;
  d.d_n = d.q_n + (a + b) / (2.0 * m) * d.delta_n + (a - b) / (2.0 * m) * d.theta_n;

  if (with_ratios) {
    const dist::BetaSymmetric law(m);
    d.ratios.resize(head);
    d.v.resize(head);
    for (std::size_t k = 0; k < head; ++k) {
      d.ratios[k] = d.z[k] / (d.z[k] + d.zprime[k]);
      d.v[k] = law.cdf(d.ratios[k]);
    }
  }
  return d;
}

double interpolate(const Grid& grid, std::span<const double> values, double t) {
  const auto pts = grid.points();
  const auto it = std::upper_bound(pts.begin(), pts.end(), t);
  if (it == pts.begin()) return values.front();
  if (it == pts.end()) return values.back();
  const auto hi = static_cast<std::size_t>(it - pts.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - pts[lo]) / (pts[hi] - pts[lo]);
  return (1.0 - w) * values[lo] + w * values[hi];
}

double apply_functional(const Functional& f, const Grid& grid, std::span<const double> values) {
  switch (f.kind) {
    case FunctionalKind::sup_abs: {
      double s = 0.0;
      for (double v : values) s = std::max(s, std::abs(v));
      return s;
    }
    case FunctionalKind::integral:
      return trapezoid(grid, values);
    case FunctionalKind::eval_at:
      return interpolate(grid, values, f.at);
  }
  return 0.0;
}

std::vector<double> uniform_sorted(Rng& rng, long n) {
  std::vector<double> x(static_cast<std::size_t>(n));
  for (double& v : x) v = rng.uniform();
  std::sort(x.begin(), x.end());
  return x;
}

double gamma_functional(const SampleDesign& design, const Functional& f, const Grid& grid,
                        std::uint64_t seed) {
  Rng rng(seed);
  const auto xs = OrderedSample::from_sorted(uniform_sorted(rng, design.n1));
  const auto ys = OrderedSample::from_sorted(uniform_sorted(rng, design.n2));
  const auto ratios = spacing_ratios(disjoint_spacings(xs, design.m, design.N),
                                     disjoint_spacings(ys, design.m, design.N), design);
  switch (f.kind) {
    case FunctionalKind::sup_abs:
      return empirical_process_sup(ratios);
    case FunctionalKind::integral:
      return empirical_process(ratios, grid).integral();
    case FunctionalKind::eval_at:
      return empirical_process_at(ratios, f.at);
  }
  return 0.0;
}

double variance_of(std::span<const double> x) { return sample_variance(x); }

}  // namespace

// ---------------------------------------------------------------------------

double RepresentationDraw::tau(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError("tau: argument must lie in [0, 1]");
  }
  if (t == 0.0 || t == 1.0) return t;
  return 1.0 / (1.0 + (1.0 / t - 1.0) * (1.0 + q_n));
}

double RepresentationDraw::sample_ratio(std::size_t k) const {
  const double sx = z.at(k) / (t_x + r_x);
  const double sy = zprime.at(k) / (t_y + r_y);
  const double a = static_cast<double>(N + P + 1) * sx;
  const double b = static_cast<double>(N + Q + 1) * sy;
  return a / (a + b);
}

RepresentationDraw representation_draw(int m, long N, long P, long Q, std::uint64_t seed) {
  return draw_blocks(m, N, P, Q, derive_seed(seed, kZetaStream), derive_seed(seed, kXiStream),
                     true);
}

RepresentationDraw representation_draw(int m, long N, long P, long Q, std::uint64_t zeta_seed,
                                       std::uint64_t xi_seed) {
  return draw_blocks(m, N, P, Q, zeta_seed, xi_seed, true);
}

// ---------------------------------------------------------------------------

Functional Functional::parse(const std::string& text) {
  if (text == "sup_abs") return {FunctionalKind::sup_abs, 0.5};
  if (text == "integral") return {FunctionalKind::integral, 0.5};
  const std::string prefix = "eval_at:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string arg = text.substr(prefix.size());
    std::size_t used = 0;
    double t = 0.0;
    try {
      t = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != arg.size() || !(t >= 0.0 && t <= 1.0)) {
      throw DomainError("eval_at needs a time in [0, 1], got '" + arg + "'");
    }
    return {FunctionalKind::eval_at, t};
  }
  throw DomainError("unknown functional '" + text + "' (sup_abs, integral, eval_at:<t>)");
}

std::string Functional::to_string() const {
  switch (kind) {
    case FunctionalKind::sup_abs:
      return "sup_abs";
    case FunctionalKind::integral:
      return "integral";
    case FunctionalKind::eval_at: {
      std::ostringstream os;
      os.precision(17);
      os << "eval_at:" << at;
      return os.str();
    }
  }
  return "";
}

std::string describe(const Source& source) {
  struct Visitor {
    std::string operator()(const GammaNSource&) const { return "gamma_n"; }
    std::string operator()(const LimitSource&) const { return "limit"; }
    std::string operator()(const BridgeComposedSource&) const { return "bridge_composed"; }
    std::string operator()(const ZeroSource&) const { return "zero"; }
  };
  return std::visit(Visitor{}, source);
}

std::vector<double> mc_functional(const Source& source, const Functional& functional,
                                  std::size_t reps, const Grid& grid, std::uint64_t master_seed,
                                  int threads) {
  if (reps == 0) {
    throw DomainError("mc_functional: reps must be at least 1");
  }
  std::vector<double> out(reps, 0.0);
  if (std::holds_alternative<ZeroSource>(source)) {
    return out;
  }
  if (const auto* g = std::get_if<GammaNSource>(&source)) {
    const SampleDesign design = g->design;
    parallel_for(reps, threads, [&](std::size_t i) {
      out[i] = gamma_functional(design, functional, grid, derive_seed(master_seed, i));
    });
    return out;
  }
  int m = 1;
  double C = 0.0;
  if (const auto* l = std::get_if<LimitSource>(&source)) {
    m = l->m;
    C = l->C;
  } else {
    m = std::get<BridgeComposedSource>(source).m;
  }
  const LimitSampler sampler(m, C, grid);
  parallel_for(reps, threads, [&](std::size_t i) {
    std::vector<double> values;
    sampler.sample_into(derive_seed(master_seed, i), values);
    out[i] = apply_functional(functional, grid, values);
  });
  return out;
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw DomainError("ks_statistic: both samples must be nonempty");
  }
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

// ---------------------------------------------------------------------------

CovarianceReport empirical_covariance(std::span<const GridPath> paths,
                                      std::span<const std::size_t> probes,
                                      const CenteredKernel& kernel) {
  if (paths.size() < 2) {
    throw DomainError("empirical_covariance: needs at least 2 paths");
  }
  const Grid& grid = paths.front().grid();
  for (const auto& p : paths) {
    if (!(p.grid() == grid)) {
      throw DomainError("empirical_covariance: paths must share one grid");
    }
  }
  for (auto idx : probes) {
    if (idx >= grid.size()) {
      throw DomainError("empirical_covariance: probe index outside the grid");
    }
  }
  const std::size_t k = probes.size();
  const double n = static_cast<double>(paths.size());
  std::vector<double> mean(k, 0.0);
  for (const auto& p : paths) {
    for (std::size_t a = 0; a < k; ++a) mean[a] += p[probes[a]];
  }
  for (double& v : mean) v /= n;

  CovarianceReport r;
  r.probes.assign(probes.begin(), probes.end());
  r.matrix.assign(k * k, 0.0);
  for (const auto& p : paths) {
    for (std::size_t a = 0; a < k; ++a) {
      const double da = p[probes[a]] - mean[a];
      for (std::size_t b = a; b < k; ++b) {
        r.matrix[a * k + b] += da * (p[probes[b]] - mean[b]);
      }
    }
  }
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      const double c = r.matrix[a * k + b] / (n - 1.0);
      r.matrix[a * k + b] = c;
      r.matrix[b * k + a] = c;
      const double target = kernel(grid[probes[a]], grid[probes[b]]);
      r.max_abs_error = std::max(r.max_abs_error, std::abs(c - target));
    }
  }
  return r;
}

QuadratureOracles quadrature_oracles(int m, std::optional<double> t) {
  const dist::BetaSymmetric law(m);
  auto h = [&](double s) { return law.cdf(s); };
  auto upper = [&](double s) { return 1.0 - law.cdf(s); };
  // int_0^1 {H(s ^ t) - H(s) H(t)} ds, split at the kink s = t.
  auto psi_quad = [&](double at) {
    if (at <= 0.0 || at >= 1.0) return 0.0;
    const double ht = law.cdf(at);
    return (1.0 - ht) * adaptive_simpson(h, 0.0, at, 1e-14) +
           ht * adaptive_simpson(upper, at, 1.0, 1e-14);
  };
  QuadratureOracles out;
  if (t) {
    if (!(*t >= 0.0 && *t <= 1.0)) {
      throw DomainError("quadrature_oracles: t must lie in [0, 1]");
    }
    out.psi_quad = psi_quad(*t);
  }
  // The double integral depends on m only; memoize it across calls.
  static std::mutex memo_mutex;
  static std::map<int, double> memo;
  std::lock_guard lock(memo_mutex);
  auto it = memo.find(m);
  if (it == memo.end()) {
    it = memo.emplace(m, adaptive_simpson(psi_quad, 0.0, 1.0, 1e-11)).first;
  }
  out.sigma2_quad = it->second;
  return out;
}

// ---------------------------------------------------------------------------

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(x.size() - 1);
}

SampleSummary summarize(std::span<const double> sample) {
  SampleSummary s;
  s.count = sample.size();
  if (sample.empty()) return s;
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  double mean = 0.0;
  for (double v : x) mean += v;
  s.mean = mean / static_cast<double>(x.size());
  s.variance = sample_variance(sample);
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(x.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, x.size() - 1);
    return x[lo] + (pos - static_cast<double>(lo)) * (x[hi] - x[lo]);
  };
  s.min = x.front();
  s.max = x.back();
  s.median = quantile(0.5);
  s.q95 = quantile(0.95);
  return s;
}

SampleDesign resolve_design(const ExperimentConfig& config) {
  if (config.n1 || config.n2) {
    if (!(config.n1 && config.n2)) {
      throw DomainError("both n1 and n2 are required when either is given");
    }
    return design_from_sizes(*config.n1, *config.n2, config.m, config.N);
  }
  if (!config.N) {
    throw DomainError("a design needs n1 and n2, or N with P and Q (or a finite regime)");
  }
  const long n = *config.N;
  auto surplus = [&](const std::optional<long>& explicit_value,
                     const std::optional<Extended>& ratio, const char* name) -> long {
    if (explicit_value) return *explicit_value;
    if (!ratio) return 0;
    if (ratio->is_infinite()) {
      throw DomainError(std::string("an infinite regime needs an explicit ") + name);
    }
    return std::lround(ratio->value() * static_cast<double>(n + 1));
  };
  return design_from_counts(config.m, n, surplus(config.P, config.c, "P"),
                            surplus(config.Q, config.d, "Q"));
}

RepresentationMoments representation_moments(int m, long N, long P, long Q, std::size_t reps,
                                             std::uint64_t seed, int threads) {
  if (reps < 2) {
    throw DomainError("representation_moments: needs at least 2 replicates");
  }
  std::vector<double> theta(reps), delta(reps), q(reps), d(reps);
  const double root = std::sqrt(static_cast<double>(N + 1));
  parallel_for(reps, threads, [&](std::size_t i) {
    const std::uint64_t s = derive_seed(seed, i);
    const auto draw =
        draw_blocks(m, N, P, Q, derive_seed(s, kZetaStream), derive_seed(s, kXiStream), false);
    theta[i] = root * draw.theta_n;
    delta[i] = root * draw.delta_n;
    q[i] = root * draw.q_n;
    d[i] = root * draw.d_n;
  });
  RepresentationMoments out;
  out.var_theta = variance_of(theta);
  out.var_delta = variance_of(delta);
  out.var_q = variance_of(q);
  out.var_d = variance_of(d);
  double mean = 0.0;
  for (double v : theta) mean += v;
  out.mean_theta = mean / static_cast<double>(reps);
  return out;
}

EventIdentityCheck check_event_identity(int m, long N, long P, long Q, std::size_t replicates,
                                        std::size_t t_values, std::uint64_t seed) {
  const dist::BetaSymmetric law(m);
  EventIdentityCheck out;
  out.replicates = replicates;
  out.t_values = t_values;
  for (std::size_t r = 0; r < replicates; ++r) {
    const std::uint64_t s = derive_seed(seed, r);
    const auto draw = representation_draw(m, N, P, Q, s);
    std::vector<double> direct(draw.ratios.size());
    for (std::size_t k = 0; k < direct.size(); ++k) direct[k] = draw.sample_ratio(k);
    Rng times(derive_seed(s, kEventTimes));
    for (std::size_t j = 0; j < t_values; ++j) {
      const double t = times.uniform();
      const double bound = law.cdf(draw.tau(t));
      for (std::size_t k = 0; k < direct.size(); ++k) {
        const bool lhs = direct[k] <= t;
        const bool rhs = draw.v[k] <= bound;
        out.comparisons += 1;
        if (lhs != rhs) out.mismatches += 1;
      }
    }
  }
  out.pass = out.mismatches == 0;
  return out;
}

MCReport run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  if (config.reps == 0) {
    throw DomainError("run_experiment: reps must be at least 1");
  }
  dist::check_order(config.m);
  MCReport report;
  report.config = config;
  report.design = resolve_design(config);
  const SampleDesign& design = report.design;
  const int m = config.m;
  const Grid grid = Grid::uniform(config.grid_points);

  Source limit = LimitSource{m, 0.0};
  if (config.c && config.d) {
    const auto params = regime(m, *config.c, *config.d);
    report.r_value = params.r_infinity;
    report.centering = params.c_plus;
    if (config.c->is_infinite() && config.d->is_infinite()) {
      limit = BridgeComposedSource{m};
      report.centering = 0.0;
    } else {
      limit = LimitSource{m, params.c_plus};
    }
  } else {
    report.r_value = r_nm(design);
    report.centering = 1.0 + std::sqrt(report.r_value);
    limit = LimitSource{m, report.centering};
  }
  report.limit_source = describe(limit);

  report.gamma_sample = mc_functional(GammaNSource{design}, config.functional, config.reps, grid,
                                      derive_seed(config.seed, kGammaStream), config.threads);
  report.limit_sample = mc_functional(limit, config.functional, config.reps, grid,
                                      derive_seed(config.seed, kLimitStream), config.threads);
  report.ks = ks_statistic(report.gamma_sample, report.limit_sample);
  report.ks_pass = report.ks <= config.ks_tolerance;

  // Finite-N analogues of the regime ratios c and d.
  const double n1 = static_cast<double>(design.N + 1);
  const auto c_n = Extended::finite(static_cast<double>(design.P) / n1);
  const auto d_n = Extended::finite(static_cast<double>(design.Q) / n1);
  const auto targets = asymptotic_variances(m, c_n, d_n);
  const std::size_t vreps = config.variance_reps ? config.variance_reps : config.reps;
  const auto moments =
      representation_moments(m, design.N, design.P, design.Q, std::max<std::size_t>(vreps, 2),
                             derive_seed(config.seed, kMomentStream), config.threads);

  auto relative = [&](std::string name, double estimate, double target) {
    VarianceCheck v;
    v.name = std::move(name);
    v.estimate = estimate;
    v.target = target;
    v.relative_error = std::abs(estimate - target) / target;
    v.tolerance = config.variance_tolerance;
    v.criterion = "relative";
    v.pass = v.relative_error <= v.tolerance;
    return v;
  };
  report.variance_checks.push_back(relative("theta_n", moments.var_theta, 2.0 * m));
  report.variance_checks.push_back(relative("q_n", moments.var_q, targets.sigma2_sq));
  if (targets.sigma1_sq <= config.d_ratio_tolerance * targets.sigma2_sq) {
    VarianceCheck v;
    v.name = "d_n";
    v.estimate = moments.var_d;
    v.target = config.d_ratio_tolerance * moments.var_q;
    v.relative_error = moments.var_q > 0.0 ? moments.var_d / moments.var_q : 0.0;
    v.tolerance = config.d_ratio_tolerance;
    v.criterion = "ratio_to_q_n";
    v.pass = moments.var_d <= v.target;
    report.variance_checks.push_back(v);
  } else {
    report.variance_checks.push_back(relative("d_n", moments.var_d, targets.sigma1_sq));
  }

  report.event_identity =
      check_event_identity(m, design.N, design.P, design.Q, config.event_reps,
                           config.event_points, derive_seed(config.seed, kEventStream));

  report.pass = report.ks_pass && report.event_identity.pass &&
                std::all_of(report.variance_checks.begin(), report.variance_checks.end(),
                            [](const VarianceCheck& v) { return v.pass; });
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace mspacings::verify
