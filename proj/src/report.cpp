#include "mspacings/report.hpp"

#include <cstdio>

#include "mspacings/errors.hpp"

namespace mspacings {

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(std::ostream& out, std::span<const std::string> header,
               std::span<const std::vector<double>> columns) {
  if (header.size() != columns.size()) {
    throw DomainError("csv header and column count differ");
  }
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns) {
    if (c.size() != rows) throw DomainError("csv columns differ in length");
  }
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      out << (j ? "," : "") << format_real(columns[j][i]);
    }
    out << '\n';
  }
}

Json to_json(const SampleDesign& d) {
  return Json{{"m", d.m}, {"n1", d.n1}, {"n2", d.n2}, {"N1", d.N1},
              {"N2", d.N2}, {"N", d.N}, {"P", d.P}, {"Q", d.Q}};
}

Json to_json(const verify::SampleSummary& s) {
  return Json{{"count", s.count}, {"mean", s.mean},     {"variance", s.variance},
              {"min", s.min},     {"median", s.median}, {"q95", s.q95},
              {"max", s.max}};
}

Json to_json(const verify::ExperimentConfig& c) {
  auto opt = [](const auto& v) -> Json { return v ? Json(*v) : Json(nullptr); };
  auto ext = [](const std::optional<Extended>& v) -> Json {
    return v ? Json(v->to_string()) : Json(nullptr);
  };
  return Json{{"m", c.m},
              {"n1", opt(c.n1)},
              {"n2", opt(c.n2)},
              {"N", opt(c.N)},
              {"P", opt(c.P)},
              {"Q", opt(c.Q)},
              {"c", ext(c.c)},
              {"d", ext(c.d)},
              {"grid_points", c.grid_points},
              {"reps", c.reps},
              {"functional", c.functional.to_string()},
              {"seed", c.seed},
              {"ks_tolerance", c.ks_tolerance},
              {"variance_tolerance", c.variance_tolerance},
              {"d_ratio_tolerance", c.d_ratio_tolerance},
              {"event_reps", c.event_reps},
              {"event_points", c.event_points},
              {"variance_reps", c.variance_reps ? c.variance_reps : c.reps}};
}

Json to_json(const verify::MCReport& r) {
  Json checks = Json::array();
  for (const auto& v : r.variance_checks) {
    checks.push_back(Json{{"name", v.name},
                          {"estimate", v.estimate},
                          {"target", v.target},
                          {"relative_error", v.relative_error},
                          {"tolerance", v.tolerance},
                          {"criterion", v.criterion},
                          {"pass", v.pass}});
  }
  const auto& e = r.event_identity;
  return Json{{"config", to_json(r.config)},
              {"design", to_json(r.design)},
              {"r_value", r.r_value},
              {"centering", r.centering},
              {"limit_source", r.limit_source},
              {"samples",
               Json{{"gamma_n", to_json(verify::summarize(r.gamma_sample))},
                    {"limit", to_json(verify::summarize(r.limit_sample))}}},
              {"ks", r.ks},
              {"ks_pass", r.ks_pass},
              {"variance_checks", checks},
              {"event_identity_checked",
               Json{{"replicates", e.replicates},
                    {"t_values", e.t_values},
                    {"comparisons", e.comparisons},
                    {"mismatches", e.mismatches},
                    {"pass", e.pass}}},
              {"pass", r.pass},
              {"seed", r.config.seed}};
}

Json to_json(const stest::TestResult& r) {
  const auto& o = r.options;
  return Json{{"statistic", r.statistic},
              {"critical_value", r.critical_value},
              {"p_value", r.p_value},
              {"decision", r.reject ? "reject" : "accept"},
              {"alpha", o.alpha},
              {"mc_reps", r.mc_reps},
              {"null_law", r.null_law},
              {"r_value", r.r_value},
              {"design", to_json(r.design)},
              {"interval_x", Json{{"lower", o.interval_x.lower}, {"length", o.interval_x.length}}},
              {"interval_y", Json{{"lower", o.interval_y.lower}, {"length", o.interval_y.length}}},
              {"grid_points", o.grid_points},
              {"warning", r.warning ? Json(*r.warning) : Json(nullptr)},
              {"seed", o.seed}};
}

}  // namespace mspacings
