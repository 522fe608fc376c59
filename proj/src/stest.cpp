#include "mspacings/stest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "mspacings/distkit.hpp"
#include "mspacings/errors.hpp"
#include "mspacings/verify.hpp"

namespace mspacings::stest {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("alpha must lie in (0, 1)");
  }
}

void check_reps(std::size_t reps) {
  if (reps < kMinNullReps) {
    throw DomainError("null simulation needs at least " + std::to_string(kMinNullReps) +
                      " replicates");
  }
}

std::string limit_key(int m, double R, std::size_t reps, std::uint64_t seed,
                      std::size_t grid_points) {
  return "limit m=" + std::to_string(m) + " R=" + fmt(R) + " sup_abs reps=" +
         std::to_string(reps) + " grid=" + std::to_string(grid_points) +
         " seed=" + std::to_string(seed);
}

std::string finite_key(const SampleDesign& d, std::size_t reps, std::uint64_t seed) {
  return "finite m=" + std::to_string(d.m) + " n1=" + std::to_string(d.n1) +
         " n2=" + std::to_string(d.n2) + " N=" + std::to_string(d.N) + " sup_abs reps=" +
         std::to_string(reps) + " seed=" + std::to_string(seed);
}

}  // namespace

NullDistribution::NullDistribution(std::vector<double> draws) : sorted_(std::move(draws)) {
  if (sorted_.empty()) {
    throw DomainError("null distribution needs at least one draw");
  }
  std::sort(sorted_.begin(), sorted_.end());
}

double NullDistribution::critical_value(double alpha) const {
  check_alpha(alpha);
  const double n = static_cast<double>(sorted_.size());
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted_.size());
  return sorted_[rank - 1];
}

double NullDistribution::p_value(double statistic) const {
  const auto it = std::lower_bound(sorted_.begin(), sorted_.end(), statistic);
  const auto above = static_cast<double>(sorted_.end() - it);
  return (1.0 + above) / (static_cast<double>(sorted_.size()) + 1.0);
}

NullDistribution limit_null(int m, double R, std::size_t reps, std::uint64_t seed,
                            std::size_t grid_points, int threads) {
  dist::check_order(m);
  const double lo = 1.0 / (2.0 * m + 1.0);
  if (!(R >= lo - 1e-12 && R <= 1.0 + 1e-12)) {
    throw DomainError("R must lie in [1/(2m+1), 1]");
  }
  check_reps(reps);
  const double C = 1.0 + std::sqrt(std::clamp(R, 0.0, 1.0));
  return NullDistribution(verify::mc_functional(verify::LimitSource{m, C}, verify::Functional{},
                                                reps, Grid::uniform(grid_points), seed, threads));
}

NullDistribution finite_null(const SampleDesign& design, std::size_t reps, std::uint64_t seed,
                             int threads) {
  check_reps(reps);
  return NullDistribution(verify::mc_functional(verify::GammaNSource{design},
                                                verify::Functional{}, reps, Grid::uniform(3),
                                                seed, threads));
}

double critical_value(int m, double R, double alpha, std::size_t reps, std::uint64_t seed,
                      std::size_t grid_points, int threads) {
  check_alpha(alpha);
  return limit_null(m, R, reps, seed, grid_points, threads).critical_value(alpha);
}

// ---------------------------------------------------------------------------

NullCache::NullCache(std::string path) : path_(std::move(path)) {
  std::ifstream in(*path_);
  if (!in) return;
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("cannot read null cache '" + *path_ + "': " + e.what());
  }
  for (const auto& [key, draws] : doc.items()) {
    entries_.emplace(key, NullDistribution(draws.get<std::vector<double>>()));
  }
}

const NullDistribution& NullCache::limit(int m, double R, std::size_t reps, std::uint64_t seed,
                                         std::size_t grid_points, int threads) {
  const auto key = limit_key(m, R, reps, seed, grid_points);
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    it = entries_.emplace(key, limit_null(m, R, reps, seed, grid_points, threads)).first;
  }
  return it->second;
}

const NullDistribution& NullCache::finite(const SampleDesign& design, std::size_t reps,
                                          std::uint64_t seed, int threads) {
  const auto key = finite_key(design, reps, seed);
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    it = entries_.emplace(key, finite_null(design, reps, seed, threads)).first;
  }
  return it->second;
}

void NullCache::save() const {
  if (!path_) return;
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& [key, dist] : entries_) {
    doc[key] = std::vector<double>(dist.sorted().begin(), dist.sorted().end());
  }
  std::ofstream out(*path_);
  if (!out) {
    throw DataError("cannot write null cache '" + *path_ + "'");
  }
  out << doc.dump() << '\n';
}

// ---------------------------------------------------------------------------

std::vector<double> rescale(std::span<const double> sample, const Interval& interval) {
  if (!(interval.length > 0.0) || !std::isfinite(interval.length) ||
      !std::isfinite(interval.lower)) {
    throw DomainError("interval length must be positive and finite");
  }
  const double upper = interval.lower + interval.length;
  std::vector<double> out;
  out.reserve(sample.size());
  for (double x : sample) {
    if (!(x > interval.lower && x < upper)) {
      throw DataError("sample value " + fmt(x) + " outside its declared interval (" +
                      fmt(interval.lower) + ", " + fmt(upper) + ")");
    }
    const double u = (x - interval.lower) / interval.length;
    if (!(u > 0.0 && u < 1.0)) {
      throw DataError("sample value " + fmt(x) + " rounds onto an interval endpoint");
    }
    out.push_back(u);
  }
  return out;
}

Statistic test_statistic(std::span<const double> x, std::span<const double> y,
                         const TestOptions& options) {
  dist::check_order(options.m);
  const auto xs = OrderedSample::from_unsorted(rescale(x, options.interval_x));
  const auto ys = OrderedSample::from_unsorted(rescale(y, options.interval_y));
  Statistic s;
  s.design = design_from_sizes(static_cast<long>(xs.n()), static_cast<long>(ys.n()), options.m);
  const auto ratios = spacing_ratios(disjoint_spacings(xs, options.m, s.design.N),
                                     disjoint_spacings(ys, options.m, s.design.N), s.design);
  // Both samples are uniform on (0, 1) after rescaling; the time change for
  // unequal lengths is a bijection of [0, 1] and leaves the sup unchanged.
  s.value = empirical_process_sup_mapped(ratios, Grid::uniform(3).points(),
                                         options.interval_x.length, options.interval_y.length);
  return s;
}

TestResult ratio_uniformity_test(std::span<const double> x, std::span<const double> y,
                                 const TestOptions& options, NullCache* cache) {
  check_alpha(options.alpha);
  check_reps(options.reps);
  const auto stat = test_statistic(x, y, options);
  TestResult r;
  r.options = options;
  r.statistic = stat.value;
  r.design = stat.design;
  r.r_value = r_nm(stat.design);
  r.mc_reps = options.reps;

  NullCache local;
  NullCache& store = cache ? *cache : local;
  const NullDistribution* null = nullptr;
  if (stat.design.N < kMinLimitN) {
    r.warning = "N=" + std::to_string(stat.design.N) + " is below " +
                std::to_string(kMinLimitN) +
                "; the null law is simulated at the actual design instead of the limit";
    r.null_law = "finite_n";
    null = &store.finite(stat.design, options.reps, options.seed, options.threads);
  } else {
    r.null_law = "limit";
    null = &store.limit(options.m, r.r_value, options.reps, options.seed, options.grid_points,
                        options.threads);
  }
  r.critical_value = null->critical_value(options.alpha);
  r.p_value = null->p_value(r.statistic);
  r.reject = r.statistic > r.critical_value;
  return r;
}

}  // namespace mspacings::stest
