// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: acceptance <path-to-mspacings-cli> [criterion numbers...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>
#include <sys/wait.h>

#include "mspacings/distkit.hpp"
#include "mspacings/gausslim.hpp"
#include "mspacings/limit_sampler.hpp"
#include "mspacings/random.hpp"
#include "mspacings/stest.hpp"
#include "mspacings/verify.hpp"
#include "oracles.hpp"

using namespace mspacings;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string details;
};

struct Criterion {
  int number;
  std::string name;
  double time_limit;  // seconds; 0 means unbounded
  std::function<Outcome()> run;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double sup_diff(const GridPath& a, const GridPath& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// 1. cdf/quantile round trip and beta cdf against quadrature.
Outcome distribution_kit() {
  double worst_trip = 0, worst_quad = 0;
  const int points = 10000;
  for (int m = 1; m <= 6; ++m) {
    const dist::BetaSymmetric beta(m);
    const dist::GammaTwoM gamma(m);
    for (int i = 0; i < points; ++i) {
      const double v = (i + 0.5) / points;
      worst_trip = std::max(worst_trip, std::abs(beta.cdf(beta.quantile(v)) - v));
      worst_trip = std::max(worst_trip, std::abs(gamma.cdf(gamma.quantile(v)) - v));
    }
    for (int i = 1; i < 100; ++i) {
      const double x = i / 100.0;
      worst_quad = std::max(worst_quad, std::abs(beta.cdf(x) - oracle::beta_cdf_quad(m, x)));
    }
  }
  return {worst_trip <= 1e-10 && worst_quad <= 1e-10,
          fmt("max round-trip error %.2e, max |beta_cdf - quadrature| %.2e", worst_trip,
              worst_quad)};
}

// 2. Closed-form constants against the Beta variance and quadrature.
Outcome closed_forms() {
  bool exact = true;
  for (int m = 1; m <= 10; ++m) {
    const double a = m;
    exact = exact && sigma2_bh(m) == a * a / ((2 * a) * (2 * a) * (2 * a + 1));
  }
  double worst = 0;
  for (int m = 1; m <= 4; ++m) {
    for (int i = 0; i < 50; ++i) {
      const double t = (i + 0.5) / 50;
      const auto q = verify::quadrature_oracles(m, t);
      worst = std::max(worst, std::abs(psi(m, t) - *q.psi_quad));
    }
  }
  return {exact && worst <= 1e-8,
          fmt("sigma2_bh exact for m<=10: %s, max |psi - quadrature| %.2e", exact ? "yes" : "no",
              worst)};
}

// 3. Kernel symmetry, coefficient coherence and J-operator group laws.
Outcome kernel_identities() {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0, 1);
  std::size_t asym = 0;
  for (int m = 1; m <= 4; ++m) {
    for (double C : {-0.5, 0.0, 0.3, 0.7, 1.0, 1.3, 1.577, 2.0, 2.5}) {
      for (int i = 0; i < 20; ++i) {
        const double s = u(rng), t = u(rng);
        if (kernel_kc(m, C, s, t) != kernel_kc(m, 2.0 - C, s, t)) ++asym;
      }
    }
  }
  double coherence = 0;
  for (int m = 1; m <= 10; ++m) {
    const double fm1 = dist::factorial(m - 1);
    const double generic = 2.0 * (2 * m + 1) * dist::factorial(2 * m - 1) / (m * fm1 * fm1);
    for (double C : {0.3, 1.0, 1.8}) {
      for (double t : {0.1, 0.5, 0.83}) {
        const double lhs = C * psi(m, t) / sigma2_bh(m);
        const double rhs = C * generic * std::pow(t * (1 - t), m);
        coherence = std::max(coherence, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
      }
    }
  }
  const auto grid = Grid::uniform(4097);
  double group = 0;
  for (int m : {1, 2, 3}) {
    const auto y = simulate_bridge_composed(m, grid, 900 + m);
    const double A = 0.4, B = 1.9;
    group = std::max(group, sup_diff(apply_jc(apply_jc(y, B, m), A, m),
                                     apply_jc(y, A + B - A * B, m)));
    group = std::max(group, sup_diff(apply_jc(apply_jc(y, A, m), A / (A - 1), m), y));
    group = std::max(group, sup_diff(apply_jc(apply_jc(y, A, m), 1.0, m), apply_jc(y, 1.0, m)));
    group = std::max(group, sup_diff(apply_jc(apply_jc(y, 2.0, m), 2.0, m), y));
  }
  return {asym == 0 && coherence <= 1e-13 && group <= 1e-9,
          fmt("K_C != K_{2-C} at %zu of 720 points, coherence %.2e, group laws %.2e", asym,
              coherence, group)};
}

// 4. sup|J_2(B o H_m)| and sup|B o H_m| share one law.
Outcome involution_law() {
  const auto grid = Grid::uniform(4097);
  const verify::Functional sup;
  double worst = 0;
  for (int m : {1, 2}) {
    const auto a = verify::mc_functional(verify::LimitSource{m, 2.0}, sup, 2000, grid,
                                         derive_seed(40, m));
    const auto b = verify::mc_functional(verify::BridgeComposedSource{m}, sup, 2000, grid,
                                         derive_seed(41, m));
    worst = std::max(worst, verify::ks_statistic(a, b));
  }
  return {worst <= 0.05, fmt("max KS over m in {1,2}: %.4f", worst)};
}

// 5. Variance of the path integral of B o H_m.
Outcome integral_variance() {
  const auto grid = Grid::uniform(1025);
  std::string details;
  bool pass = true;
  for (int m : {1, 2, 3}) {
    const LimitSampler sampler(m, 0.0, grid);
    std::vector<double> path;
    std::vector<double> integrals(100000);
    for (std::size_t i = 0; i < integrals.size(); ++i) {
      integrals[i] = sampler.sample_into(derive_seed(50 + m, i), path);
    }
    const double target = 1.0 / (4.0 * (2 * m + 1));
    const double rel = std::abs(oracle::variance(integrals) / target - 1);
    pass = pass && rel <= 0.05;
    details += fmt("%sm=%d rel.err %.4f", details.empty() ? "" : ", ", m, rel);
  }
  return {pass, details};
}

verify::ExperimentConfig regime_config(int m) {
  verify::ExperimentConfig c;
  c.m = m;
  c.reps = 2000;
  c.event_reps = 10;
  c.event_points = 10;
  return c;
}

// 6. Finite-N law against the limit when c = d = 0.
Outcome regime_zero() {
  double worst = 0;
  std::string details;
  for (int m : {1, 2}) {
    auto c = regime_config(m);
    c.n1 = 1000L * m - 1;
    c.n2 = 1000L * m - 1;
    c.c = Extended::finite(0);
    c.d = Extended::finite(0);
    c.seed = 600 + m;
    const auto r = verify::run_experiment(c);
    worst = std::max(worst, r.ks);
    details += fmt("%sm=%d N=%ld C=%.4f KS %.4f", details.empty() ? "" : ", ", m, r.design.N,
                   r.centering, r.ks);
  }
  return {worst <= 0.07, details};
}

// 7. Finite-N law against B o H_m when c = d = infinity.
Outcome regime_infinite() {
  double worst = 0;
  std::string details;
  for (int m : {1, 2}) {
    auto c = regime_config(m);
    c.N = 200;
    c.P = 20000;
    c.Q = 20000;
    c.c = Extended::infinity();
    c.d = Extended::infinity();
    c.seed = 700 + m;
    const auto r = verify::run_experiment(c);
    worst = std::max(worst, r.ks);
    details += fmt("%sm=%d source=%s KS %.4f", details.empty() ? "" : ", ", m,
                   r.limit_source.c_str(), r.ks);
  }
  return {worst <= 0.07, details};
}

// 8. Representation variances.
Outcome representation_variances() {
  bool pass = true;
  std::string details;
  for (int m : {1, 2}) {
    const auto mo = verify::representation_moments(m, 5000, 0, 0, 5000, 800 + m);
    const double rq = std::abs(mo.var_q / (2.0 / m) - 1);
    const double rt = std::abs(mo.var_theta / (2.0 * m) - 1);
    const double rd = mo.var_d / mo.var_q;
    pass = pass && rq <= 0.10 && rt <= 0.10 && rd <= 0.05;
    details += fmt("%sm=%d Q rel.err %.4f, Theta rel.err %.4f, Var D/Var Q %.2e",
                   details.empty() ? "" : "; ", m, rq, rt, rd);
  }
  return {pass, details};
}

// 9. Exact event identity.
Outcome event_identity() {
  std::size_t comparisons = 0, mismatches = 0;
  for (int m : {1, 2, 3}) {
    const auto e = verify::check_event_identity(m, 999, 50, 300, 100, 50, 900 + m);
    comparisons += e.comparisons;
    mismatches += e.mismatches;
  }
  return {mismatches == 0 && comparisons > 0,
          fmt("%zu mismatches in %zu comparisons", mismatches, comparisons)};
}

std::vector<double> uniform_sample(std::uint64_t seed, std::size_t n, double scale) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = scale * rng.uniform();
  return x;
}

// 10. Test calibration, reparametrization invariance, Kolmogorov cross-check.
Outcome test_calibration() {
  stest::TestOptions o;
  stest::NullCache cache;
  const int trials = 2000;
  int rejections = 0;
  std::vector<double> stat11(trials), stat13(trials);
  for (int t = 0; t < trials; ++t) {
    const auto x = uniform_sample(derive_seed(1000, t), 2000, 1.0);
    const auto y = uniform_sample(derive_seed(2000, t), 2000, 1.0);
    const auto r = stest::ratio_uniformity_test(x, y, o, &cache);
    rejections += r.reject ? 1 : 0;
    stat11[t] = r.statistic;

    auto wide = o;
    wide.interval_y = {0.0, 3.0};
    const auto x3 = uniform_sample(derive_seed(3000, t), 2000, 1.0);
    const auto y3 = uniform_sample(derive_seed(4000, t), 2000, 3.0);
    stat13[t] = stest::test_statistic(x3, y3, wide).value;
  }
  const double rate = static_cast<double>(rejections) / trials;
  const double ks = verify::ks_statistic(stat11, stat13);
  const double cv = stest::critical_value(1, 1.0, 0.05, 100000, 2024, 8193);
  const double kq = oracle::kolmogorov_quantile(0.95);
  const bool pass = rate >= 0.03 && rate <= 0.07 && ks <= 0.05 && std::abs(cv - kq) <= 0.02;
  return {pass, fmt("null rejection rate %.4f, invariance KS %.4f, critical value %.4f vs "
                    "Kolmogorov %.4f",
                    rate, ks, cv, kq)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// 11. Same seed, different thread counts, byte-identical files.
Outcome determinism(const std::string& cli) {
  const auto dir = fs::temp_directory_path() / "mspacings_acceptance";
  fs::create_directories(dir);
  {
    std::ofstream x(dir / "x.txt"), y(dir / "y.txt");
    x.precision(17);
    y.precision(17);
    for (double v : uniform_sample(11, 1500, 1.0)) x << v << '\n';
    for (double v : uniform_sample(12, 1500, 2.0)) y << v << '\n';
  }
  const std::string xs = (dir / "x.txt").string(), ys = (dir / "y.txt").string();
  const std::vector<std::pair<std::string, std::string>> commands{
      {"dist", "dist --m 3 --grid 200"},
      {"dist_gamma", "dist --m 2 --family gamma --grid 100 --format json"},
      {"simulate_process", "simulate --m 2 --n1 399 --n2 599 --reps 20 --grid 129"},
      {"simulate_ratios", "simulate --m 1 --n1 299 --n2 299 --kind ratios --reps 5"},
      {"limit_path", "limit --m 2 --regime c=0,d=0 --grid 257 --reps 10"},
      {"limit_kernel", "limit --m 1 --C 1.5 --kind kernel --grid 33"},
      {"verify", "verify --m 1 --n1 499 --n2 499 --regime c=0,d=0 --reps 300 --grid 1025 "
                 "--event-reps 5"},
      {"test", "test --m 1 --x " + xs + " --y " + ys + " --y-interval 0,2 --reps 1000 --grid 513"},
  };
  std::size_t identical = 0;
  std::string failures;
  for (const auto& [name, args] : commands) {
    std::string outputs[2];
    int codes[2];
    for (int k = 0; k < 2; ++k) {
      const int threads = k == 0 ? 1 : 4;
      const auto out = dir / (name + "_" + std::to_string(threads) + ".out");
      fs::remove(out);
      const std::string command = "\"" + cli + "\" " + args + " --seed 5 --threads " +
                                  std::to_string(threads) + " --out \"" + out.string() +
                                  "\" 2>/dev/null";
      const int status = std::system(command.c_str());
      codes[k] = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
      outputs[k] = slurp(out);
    }
    const bool ok = codes[0] == codes[1] && (codes[0] == 0 || codes[0] == 1) &&
                    !outputs[0].empty() && outputs[0] == outputs[1];
    if (ok) {
      ++identical;
    } else {
      failures += " " + name;
    }
  }
  return {identical == commands.size(),
          fmt("%zu of %zu invocations byte-identical across --threads 1 and 4%s%s", identical,
              commands.size(), failures.empty() ? "" : "; differing:", failures.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <mspacings-cli> [criterion...]\n";
    return 2;
  }
  const std::string cli = argv[1];
  std::set<int> only;
  for (int i = 2; i < argc; ++i) only.insert(std::atoi(argv[i]));

  const std::vector<Criterion> criteria{
      {1, "distribution kit", 10, distribution_kit},
      {2, "closed-form constants", 30, closed_forms},
      {3, "kernel identities", 5, kernel_identities},
      {4, "J_2 law identity", 120, involution_law},
      {5, "path integral variance", 180, integral_variance},
      {6, "regime c=d=0", 600, regime_zero},
      {7, "regime c=d=inf", 600, regime_infinite},
      {8, "representation variances", 120, representation_variances},
      {9, "event identity", 60, event_identity},
      {10, "test calibration", 900, test_calibration},
      {11, "determinism", 0, [&cli] { return determinism(cli); }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.number)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.time_limit <= 0 || secs < c.time_limit;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << c.number << ". " << c.name << ": "
              << o.details;
    if (c.time_limit > 0) {
      std::cout << fmt(" (%.1f s, limit %.0f s%s)", secs, c.time_limit,
                       in_time ? "" : ", exceeded");
    } else {
      std::cout << fmt(" (%.1f s)", secs);
    }
    std::cout << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
