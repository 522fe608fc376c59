#include "mspacings/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include "mspacings/distkit.hpp"
#include "mspacings/errors.hpp"
#include "mspacings/gausslim.hpp"
#include "mspacings/limit_sampler.hpp"
#include "mspacings/parallel.hpp"
#include "mspacings/random.hpp"
#include "mspacings/report.hpp"
#include "mspacings/spacings.hpp"
#include "mspacings/stest.hpp"
#include "mspacings/verify.hpp"

namespace mspacings::cli {

namespace {

struct Regime {
  Extended c = Extended::finite(0.0);
  Extended d = Extended::finite(0.0);
};

// "c=<x>,d=<y>" with x, y nonnegative or inf.
Regime parse_regime(const std::string& text) {
  Regime r;
  bool seen_c = false;
  bool seen_d = false;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) {
      throw DomainError("--regime expects c=<x>,d=<y>, got '" + text + "'");
    }
    const std::string key = part.substr(0, eq);
    const auto value = Extended::parse(part.substr(eq + 1));
    if (key == "c") {
      r.c = value;
      seen_c = true;
    } else if (key == "d") {
      r.d = value;
      seen_d = true;
    } else {
      throw DomainError("--regime keys are c and d, got '" + key + "'");
    }
  }
  if (!seen_c || !seen_d) {
    throw DomainError("--regime needs both c and d");
  }
  return r;
}

// Open interval "a,b" with a < b.
stest::Interval parse_interval(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw DomainError("interval expects a,b, got '" + text + "'");
  }
  double a = 0.0;
  double b = 0.0;
  try {
    a = std::stod(text.substr(0, comma));
    b = std::stod(text.substr(comma + 1));
  } catch (const std::exception&) {
    throw DomainError("cannot parse interval '" + text + "'");
  }
  if (!(b > a)) {
    throw DomainError("interval '" + text + "' is empty");
  }
  return {a, b - a};
}

std::vector<double> read_sample(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open sample file '" + path + "'");
  }
  std::vector<double> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(line.substr(first), &used);
    } catch (const std::exception&) {
      throw DataError("cannot parse '" + line + "' in " + path);
    }
    out.push_back(v);
  }
  return out;
}

// Resolves --seed, falling back to MSPACINGS_SEED, then 0.
std::uint64_t resolve_seed(const CLI::Option* flag, std::uint64_t value) {
  if (flag->count() > 0) return value;
  if (const char* env = std::getenv("MSPACINGS_SEED")) {
    try {
      std::size_t used = 0;
      const auto s = std::stoull(env, &used);
      if (used == std::string(env).size()) return s;
    } catch (const std::exception&) {
    }
    throw DomainError(std::string("MSPACINGS_SEED is not an unsigned integer: '") + env + "'");
  }
  return 0;
}

// Sends the body to --out when set, otherwise to `out`.
void emit(const std::string& path, std::ostream& out, const std::string& body) {
  if (path.empty()) {
    out << body;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw DataError("cannot write '" + path + "'");
  }
  file << body;
}

std::string csv(std::span<const std::string> header, std::span<const std::vector<double>> cols) {
  std::ostringstream os;
  write_csv(os, header, cols);
  return os.str();
}

std::vector<double> index_column(std::size_t reps, std::size_t per) {
  std::vector<double> out;
  out.reserve(reps * per);
  for (std::size_t i = 0; i < reps; ++i) out.insert(out.end(), per, static_cast<double>(i));
  return out;
}

std::vector<double> uniform_draw(Rng& rng, long n) {
  std::vector<double> x(static_cast<std::size_t>(n));
  for (double& v : x) v = rng.uniform();
  return x;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"m-spacings ratio empirical process toolkit", "mspacings"};
  app.require_subcommand(1);

  // Shared flag values.
  int m = 1;
  long n1 = 0, n2 = 0, N = 0, P = 0, Q = 0;
  std::string regime_text;
  std::size_t grid = 0;
  std::size_t reps = 0;
  double alpha = 0.05;
  std::uint64_t seed_value = 0;
  int threads = 1;
  std::string out_path;
  std::string dist_format = "csv", sim_format = "csv", lim_format = "csv";
  std::string ver_format = "json", test_format = "json";

  struct Flags {
    CLI::Option* n1 = nullptr;
    CLI::Option* n2 = nullptr;
    CLI::Option* N = nullptr;
    CLI::Option* P = nullptr;
    CLI::Option* Q = nullptr;
    CLI::Option* regime = nullptr;
    CLI::Option* grid = nullptr;
    CLI::Option* reps = nullptr;
    CLI::Option* seed = nullptr;
  };

  auto add_common = [&](CLI::App* sub, Flags& f, std::string& format) {
    sub->add_option("--m", m, "order of the spacings")->capture_default_str();
    f.seed = sub->add_option("--seed", seed_value, "master seed (env MSPACINGS_SEED)");
    sub->add_option("--threads", threads, "worker threads; never changes output");
    sub->add_option("--out", out_path, "output file (default stdout)");
    sub->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  };
  auto add_design = [&](CLI::App* sub, Flags& f) {
    f.n1 = sub->add_option("--n1", n1, "size of the first sample");
    f.n2 = sub->add_option("--n2", n2, "size of the second sample");
    f.N = sub->add_option("--N", N, "number of spacing pairs minus one");
    f.P = sub->add_option("--P", P, "surplus pairs of the first sample");
    f.Q = sub->add_option("--Q", Q, "surplus pairs of the second sample");
  };

  // dist
  Flags fdist;
  auto* dist_cmd = app.add_subcommand("dist", "Beta(m,m) and Gamma(2m,1) tables");
  std::string family = "beta";
  std::vector<double> cdf_at, pdf_at, quantile_at;
  // --seed and --threads are accepted for uniformity; dist is deterministic.
  add_common(dist_cmd, fdist, dist_format);
  dist_cmd->add_option("--family", family, "beta or gamma")
      ->check(CLI::IsMember({"beta", "gamma"}));
  dist_cmd->add_option("--cdf", cdf_at, "cdf at x");
  dist_cmd->add_option("--pdf", pdf_at, "density at x");
  dist_cmd->add_option("--quantile", quantile_at, "quantile at v");
  fdist.grid = dist_cmd->add_option("--grid", grid, "table of cdf/pdf at grid points");

  // simulate
  Flags fsim;
  auto* sim_cmd = app.add_subcommand("simulate", "ratio empirical process paths or ratios");
  std::string sim_kind = "process";
  add_common(sim_cmd, fsim, sim_format);
  add_design(sim_cmd, fsim);
  sim_cmd->add_option("--kind", sim_kind, "process or ratios")
      ->check(CLI::IsMember({"process", "ratios"}));
  fsim.grid = sim_cmd->add_option("--grid", grid, "grid points for process paths");
  fsim.reps = sim_cmd->add_option("--reps", reps, "number of replicates");

  // limit
  Flags flim;
  auto* lim_cmd = app.add_subcommand("limit", "limit paths or kernel tables");
  std::string lim_kind = "path";
  double centering = 0.0;
  add_common(lim_cmd, flim, lim_format);
  lim_cmd->add_option("--kind", lim_kind, "path or kernel")
      ->check(CLI::IsMember({"path", "kernel"}));
  auto* c_flag = lim_cmd->add_option("--C", centering, "centering constant");
  flim.regime = lim_cmd->add_option("--regime", regime_text, "c=<x>,d=<y>; uses C = 1 + sqrt(R)");
  flim.grid = lim_cmd->add_option("--grid", grid, "grid points");
  flim.reps = lim_cmd->add_option("--reps", reps, "number of paths");

  // verify
  Flags fver;
  auto* ver_cmd = app.add_subcommand("verify", "compare gamma_N with its limit law");
  verify::ExperimentConfig config;
  std::string functional = "sup_abs";
  std::string samples_path;
  add_common(ver_cmd, fver, ver_format);
  add_design(ver_cmd, fver);
  fver.regime = ver_cmd->add_option("--regime", regime_text, "c=<x>,d=<y>");
  fver.grid = ver_cmd->add_option("--grid", grid, "grid points for limit paths");
  fver.reps = ver_cmd->add_option("--reps", reps, "replicates per group");
  ver_cmd->add_option("--functional", functional, "sup_abs, integral or eval_at:<t>");
  ver_cmd->add_option("--ks-tol", config.ks_tolerance, "KS tolerance");
  ver_cmd->add_option("--var-tol", config.variance_tolerance, "relative variance tolerance");
  ver_cmd->add_option("--d-ratio-tol", config.d_ratio_tolerance, "Var(D)/Var(Q) tolerance");
  ver_cmd->add_option("--event-reps", config.event_reps, "event identity replicates");
  ver_cmd->add_option("--event-points", config.event_points, "t values per replicate");
  ver_cmd->add_option("--variance-reps", config.variance_reps, "representation draws");
  ver_cmd->add_option("--samples", samples_path, "also write both functional samples as CSV");

  // test
  Flags ftest;
  auto* test_cmd = app.add_subcommand("test", "two-sample uniformity test");
  std::string x_path, y_path, x_interval = "0,1", y_interval = "0,1", cache_path;
  add_common(test_cmd, ftest, test_format);
  test_cmd->add_option("--x", x_path, "first sample, one value per line")->required();
  test_cmd->add_option("--y", y_path, "second sample, one value per line")->required();
  test_cmd->add_option("--x-interval", x_interval, "declared interval a,b of x");
  test_cmd->add_option("--y-interval", y_interval, "declared interval a,b of y");
  test_cmd->add_option("--alpha", alpha, "level");
  ftest.reps = test_cmd->add_option("--reps", reps, "null replicates (>= 1000)");
  ftest.grid = test_cmd->add_option("--grid", grid, "grid points for limit paths");
  test_cmd->add_option("--cache", cache_path, "JSON file caching null draws");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  auto value_or = [](const CLI::Option* flag, auto value, auto fallback) {
    return (flag && flag->count() > 0) ? value : fallback;
  };

  try {
    if (dist_cmd->parsed()) {
      const std::string& format = dist_format;
      if (family == "beta") dist::check_order(m);
      if (cdf_at.empty() && pdf_at.empty() && quantile_at.empty() && fdist.grid->count() == 0) {
        throw DomainError("dist needs --cdf, --pdf, --quantile or --grid");
      }
      const bool beta = family == "beta";
      auto cdf = [&](double x) { return beta ? dist::beta_cdf(m, x) : dist::gamma2m_cdf(m, x); };
      auto pdf = [&](double x) { return beta ? dist::beta_pdf(m, x) : dist::gamma2m_pdf(m, x); };
      auto qf = [&](double v) {
        return beta ? dist::beta_quantile(m, v) : dist::gamma2m_quantile(m, v);
      };
      if (fdist.grid->count() > 0) {
        if (grid < 2) throw DomainError("--grid needs at least 2 points");
        std::vector<double> x(grid), c(grid), p(grid), v(grid), q(grid);
        const auto g = Grid::uniform(grid);
        for (std::size_t i = 0; i < grid; ++i) {
          // Gamma tables run over [0, 4m]; the beta support is [0, 1].
          x[i] = beta ? g[i] : 4.0 * m * g[i];
          c[i] = cdf(x[i]);
          p[i] = pdf(x[i]);
          // Quantiles at cell midpoints stay inside (0, 1).
          v[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(grid);
          q[i] = qf(v[i]);
        }
        if (format == "json") {
          emit(out_path, out,
               Json{{"family", family}, {"m", m}, {"x", x}, {"cdf", c}, {"pdf", p},
                    {"v", v},
                    {"quantile", q}}
                       .dump(2) +
                   "\n");
        } else {
          const std::vector<std::string> header{"x", "cdf", "pdf", "v", "quantile"};
          const std::vector<std::vector<double>> cols{
              x, c, p, v, q};
          emit(out_path, out, csv(header, cols));
        }
        return kExitOk;
      }
      std::ostringstream os;
      if (format == "json") {
        Json j{{"family", family}, {"m", m}};
        auto put = [&](const char* name, const std::vector<double>& at, auto f) {
          if (at.empty()) return;
          Json rows = Json::array();
          for (double a : at) rows.push_back(Json{{"at", a}, {"value", f(a)}});
          j[name] = rows;
        };
        put("cdf", cdf_at, cdf);
        put("pdf", pdf_at, pdf);
        put("quantile", quantile_at, qf);
        os << j.dump(2) << '\n';
      } else {
        for (double a : cdf_at) os << format_real(cdf(a)) << '\n';
        for (double a : pdf_at) os << format_real(pdf(a)) << '\n';
        for (double a : quantile_at) os << format_real(qf(a)) << '\n';
      }
      emit(out_path, out, os.str());
      return kExitOk;
    }

    if (sim_cmd->parsed()) {
      const std::string& format = sim_format;
      const auto seed = resolve_seed(fsim.seed, seed_value);
      const bool sizes = fsim.n1->count() && fsim.n2->count();
      const bool counts = fsim.N->count() && fsim.P->count() && fsim.Q->count();
      if (!sizes && !counts) {
        throw DomainError("simulate needs --n1 and --n2, or --N, --P and --Q");
      }
      const auto design = sizes ? design_from_sizes(n1, n2, m,
                                                    fsim.N->count() ? std::optional<long>(N)
                                                                    : std::nullopt)
                                : design_from_counts(m, N, P, Q);
      const std::size_t count = value_or(fsim.reps, reps, std::size_t{1});
      if (count == 0) throw DomainError("--reps must be at least 1");
      const std::size_t points = value_or(fsim.grid, grid, std::size_t{1025});
      const auto g = Grid::uniform(points);
      std::vector<std::vector<double>> per_rep(count);
      parallel_for(count, threads, [&](std::size_t i) {
        Rng rng(derive_seed(seed, i));
        const auto xs = OrderedSample::from_unsorted(uniform_draw(rng, design.n1));
        const auto ys = OrderedSample::from_unsorted(uniform_draw(rng, design.n2));
        const auto ratios = spacing_ratios(disjoint_spacings(xs, m, design.N),
                                           disjoint_spacings(ys, m, design.N), design);
        if (sim_kind == "ratios") {
          per_rep[i].assign(ratios.ratios().begin(), ratios.ratios().end());
        } else {
          const auto path = empirical_process(ratios, g);
          per_rep[i].assign(path.values().begin(), path.values().end());
        }
      });
      const std::size_t per = per_rep.front().size();
      std::vector<double> index, value;
      for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t k = 0; k < per; ++k) {
          index.push_back(sim_kind == "ratios" ? static_cast<double>(k) : g[k]);
          value.push_back(per_rep[i][k]);
        }
      }
      const std::string key = sim_kind == "ratios" ? "k" : "t";
      const std::string val = sim_kind == "ratios" ? "r_k" : "gamma";
      if (format == "json") {
        emit(out_path, out,
             Json{{"design", to_json(design)}, {"kind", sim_kind}, {"seed", seed},
                  {"reps", count}, {"paths", per_rep}}
                     .dump() +
                 "\n");
      } else {
        const std::vector<std::string> header{"rep", key, val};
        const std::vector<std::vector<double>> cols{index_column(count, per), index, value};
        emit(out_path, out, csv(header, cols));
      }
      return kExitOk;
    }

    if (lim_cmd->parsed()) {
      const std::string& format = lim_format;
      const auto seed = resolve_seed(flim.seed, seed_value);
      dist::check_order(m);
      if (c_flag->count() && flim.regime->count()) {
        throw DomainError("give --C or --regime, not both");
      }
      double C = centering;
      if (flim.regime->count()) {
        const auto r = parse_regime(regime_text);
        C = regime(m, r.c, r.d).c_plus;
      }
      if (lim_kind == "kernel") {
        const std::size_t points = value_or(flim.grid, grid, std::size_t{11});
        const auto g = Grid::uniform(points);
        const CenteredKernel kernel{m, C};
        std::vector<double> s, t, k;
        for (std::size_t i = 0; i < points; ++i) {
          for (std::size_t j = 0; j < points; ++j) {
            s.push_back(g[i]);
            t.push_back(g[j]);
            k.push_back(kernel(g[i], g[j]));
          }
        }
        if (format == "json") {
          emit(out_path, out,
               Json{{"m", m}, {"C", C}, {"s", s}, {"t", t}, {"k", k}}.dump() + "\n");
        } else {
          const std::vector<std::string> header{"s", "t", "k"};
          const std::vector<std::vector<double>> cols{s, t, k};
          emit(out_path, out, csv(header, cols));
        }
        return kExitOk;
      }
      const std::size_t count = value_or(flim.reps, reps, std::size_t{1});
      if (count == 0) throw DomainError("--reps must be at least 1");
      const std::size_t points = value_or(flim.grid, grid, std::size_t{1025});
      const LimitSampler sampler(m, C, Grid::uniform(points));
      std::vector<std::vector<double>> paths(count);
      parallel_for(count, threads,
                   [&](std::size_t i) { sampler.sample_into(derive_seed(seed, i), paths[i]); });
      if (format == "json") {
        emit(out_path, out,
             Json{{"m", m}, {"C", C}, {"seed", seed}, {"reps", count}, {"paths", paths}}.dump() +
                 "\n");
      } else {
        std::vector<double> t, v;
        for (const auto& p : paths) {
          for (std::size_t k = 0; k < points; ++k) {
            t.push_back(sampler.grid()[k]);
            v.push_back(p[k]);
          }
        }
        const std::vector<std::string> header{"rep", "t", "value"};
        const std::vector<std::vector<double>> cols{index_column(count, points), t, v};
        emit(out_path, out, csv(header, cols));
      }
      return kExitOk;
    }

    if (ver_cmd->parsed()) {
      const std::string& format = ver_format;
      config.m = m;
      config.seed = resolve_seed(fver.seed, seed_value);
      config.threads = threads;
      if (fver.n1->count()) config.n1 = n1;
      if (fver.n2->count()) config.n2 = n2;
      if (fver.N->count()) config.N = N;
      if (fver.P->count()) config.P = P;
      if (fver.Q->count()) config.Q = Q;
      if (fver.regime->count()) {
        const auto r = parse_regime(regime_text);
        config.c = r.c;
        config.d = r.d;
      }
      if (fver.grid->count()) config.grid_points = grid;
      if (fver.reps->count()) config.reps = reps;
      config.functional = verify::Functional::parse(functional);
      const auto report = verify::run_experiment(config);
      err << "verify: wall clock " << report.wall_clock_seconds << " s\n";
      if (format == "json") {
        emit(out_path, out, to_json(report).dump(2) + "\n");
      } else {
        const std::vector<std::string> header{"name", "estimate", "target", "pass"};
        std::ostringstream os;
        os << "check,value,target,pass\n";
        os << "ks," << format_real(report.ks) << ',' << format_real(config.ks_tolerance) << ','
           << report.ks_pass << '\n';
        for (const auto& v : report.variance_checks) {
          os << v.name << ',' << format_real(v.estimate) << ',' << format_real(v.target) << ','
             << v.pass << '\n';
        }
        os << "event_identity," << report.event_identity.mismatches << ",0,"
           << report.event_identity.pass << '\n';
        emit(out_path, out, os.str());
      }
      if (!samples_path.empty()) {
        const std::vector<std::string> header{"rep", "gamma_n", "limit"};
        std::vector<double> idx(report.gamma_sample.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<double>(i);
        const std::vector<std::vector<double>> cols{idx, report.gamma_sample,
                                                    report.limit_sample};
        emit(samples_path, out, csv(header, cols));
      }
      return report.pass ? kExitOk : kExitFailedCheck;
    }

    if (test_cmd->parsed()) {
      const std::string& format = test_format;
      stest::TestOptions options;
      options.m = m;
      options.alpha = alpha;
      options.seed = resolve_seed(ftest.seed, seed_value);
      options.threads = threads;
      options.reps = value_or(ftest.reps, reps, options.reps);
      options.grid_points = value_or(ftest.grid, grid, options.grid_points);
      options.interval_x = parse_interval(x_interval);
      options.interval_y = parse_interval(y_interval);
      const auto x = read_sample(x_path);
      const auto y = read_sample(y_path);
      std::optional<stest::NullCache> cache;
      if (!cache_path.empty()) cache.emplace(cache_path);
      const auto result =
          stest::ratio_uniformity_test(x, y, options, cache ? &*cache : nullptr);
      if (cache) cache->save();
      if (result.warning) err << "warning: " << *result.warning << '\n';
      if (format == "json") {
        emit(out_path, out, to_json(result).dump(2) + "\n");
      } else {
        std::ostringstream os;
        os << "statistic,critical_value,p_value,decision\n"
           << format_real(result.statistic) << ',' << format_real(result.critical_value) << ','
           << format_real(result.p_value) << ',' << (result.reject ? "reject" : "accept")
           << '\n';
        emit(out_path, out, os.str());
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace mspacings::cli
