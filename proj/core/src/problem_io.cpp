#include "krein/problem_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace krein::io {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorKind::InvalidArgument, "problem file: " + what); }

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json spectrum_json(const std::vector<cplx>& v) {
  json out = json::array();
  for (cplx z : v) out.push_back(complex_json(z));
  return out;
}

// Non-finite doubles are not JSON; they are written as null.
json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

cplx parse_complex(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    bad(where + ": complex entries must be [re, im]");
  }
  const cplx z(j[0].get<double>(), j[1].get<double>());
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) bad(where + ": non-finite entry");
  return z;
}

CMatrix parse_matrix(const json& j, Eigen::Index rows, Eigen::Index cols, const std::string& name) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) bad(name + ": expected " + std::to_string(rows) + " rows");
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      bad(name + ": expected " + std::to_string(cols) + " columns");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = parse_complex(row[c], name);
  }
  return m;
}

void apply_overrides(const json& j, SolverConfig& cfg) {
  if (!j.is_object()) bad("config must be an object");
  if (j.contains("eps_schedule")) cfg.eps_schedule = j["eps_schedule"].get<std::vector<double>>();
  if (j.contains("galerkin_dims")) {
    cfg.galerkin_dims.clear();
    for (const auto& d : j["galerkin_dims"]) cfg.galerkin_dims.push_back(d.get<Eigen::Index>());
  }
  if (j.contains("mu")) cfg.fixed_mu = parse_complex(j["mu"], "config.mu");
  if (j.contains("contour_radius")) cfg.contour_radius = j["contour_radius"].get<double>();
  if (j.contains("contour_nodes")) cfg.contour_nodes = j["contour_nodes"].get<int>();
  if (j.contains("rule")) {
    const auto rule = j["rule"].get<std::string>();
    if (rule == "trapezoid") cfg.rule = QuadratureRule::trapezoid;
    else if (rule == "gauss_segments") cfg.rule = QuadratureRule::gauss_segments;
    else bad("unknown quadrature rule " + rule);
  }
  if (j.contains("polish")) cfg.polish = j["polish"].get<bool>();
  if (j.contains("check_quadrature_convergence")) {
    cfg.check_quadrature_convergence = j["check_quadrature_convergence"].get<bool>();
  }
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    auto take = [&](const char* key, double& dst) {
      if (t.contains(key)) dst = t[key].get<double>();
    };
    take("riccati_tol", cfg.tol.riccati_tol);
    take("invariance_tol", cfg.tol.invariance_tol);
    take("norm_slack", cfg.tol.norm_slack);
    take("spec_slack", cfg.tol.spec_slack);
    take("cauchy_tol", cfg.tol.cauchy_tol);
    take("dissipativity_tol", cfg.tol.dissipativity_tol);
    if (t.contains("cauchy_window")) cfg.tol.cauchy_window = t["cauchy_window"].get<int>();
  }
  cfg.validate();
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

ProblemFile parse_problem(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }
  try {
    if (!j.is_object()) bad("top level must be an object");
    if (!j.contains("version") || j["version"] != "1") bad("version must be \"1\"");
    if (!j.contains("structure")) bad("missing structure");
    const auto p = j["structure"].at("p").get<Eigen::Index>();
    const auto m = j["structure"].at("m").get<Eigen::Index>();
    if (p < 1 || m < 1) bad("p and m must be >= 1");
    if (!j.contains("blocks")) bad("missing blocks");
    const json& b = j["blocks"];
    ProblemFile out{BlockOperator(parse_matrix(b.at("A11"), p, p, "A11"), parse_matrix(b.at("A12"), p, m, "A12"),
                                  parse_matrix(b.at("A21"), m, p, "A21"), parse_matrix(b.at("A22"), m, m, "A22")),
                    default_solver_config(), std::nullopt};
    if (j.contains("config")) apply_overrides(j["config"], out.config);
    if (j.contains("generator")) {
      const json& g = j["generator"];
      InstanceSpec s;
      s.p = p;
      s.m = m;
      s.margin = g.value("margin", 0.0);
      s.coupling_scale = g.value("coupling", 1.0);
      s.a22_decay = g.value("a22_decay", 0.5);
      s.seed = g.value("seed", std::uint64_t{0});
      out.origin = s;
    }
    return out;
  } catch (const json::exception& e) {
    bad(e.what());
  }
}

std::string serialize_problem(const BlockOperator& a, const std::optional<InstanceSpec>& origin) {
  json j;
  j["version"] = "1";
  j["structure"] = {{"p", a.structure().p()}, {"m", a.structure().m()}};
  j["blocks"] = {{"A11", matrix_json(a.a11())},
                 {"A12", matrix_json(a.a12())},
                 {"A21", matrix_json(a.a21())},
                 {"A22", matrix_json(a.a22())}};
  if (origin) {
    j["generator"] = {{"seed", origin->seed},
                      {"margin", origin->margin},
                      {"coupling", origin->coupling_scale},
                      {"a22_decay", origin->a22_decay}};
  }
  return j.dump(2) + "\n";
}

std::vector<cplx> sorted_spectrum(std::vector<cplx> values) {
  std::sort(values.begin(), values.end(), [](cplx x, cplx y) {
    if (x.imag() != y.imag()) return x.imag() > y.imag();
    return x.real() < y.real();
  });
  return values;
}

std::string report_to_json(const SolveReport& r, std::string_view status) {
  json j;
  j["status"] = std::string(status);
  j["structure"] = {{"p", r.structure.p()}, {"m", r.structure.m()}};
  j["K"] = matrix_json(r.k);
  j["L"] = matrix_json(r.l_op);
  j["restriction"] = matrix_json(r.restriction);
  j["restriction_spectrum"] = spectrum_json(sorted_spectrum(r.restriction_spectrum));
  j["mu"] = complex_json(r.mu);
  j["margin"] = number(r.margin);
  j["A_norm"] = number(r.a_norm);
  j["S_norm"] = number(r.s_norm);
  j["K_norm"] = number(r.k_norm);
  j["riccati_residual"] = number(r.riccati_residual);
  j["unpolished_riccati_residual"] = number(r.unpolished_riccati_residual);
  j["polish_iterations"] = r.polish_iterations;
  j["invariance_residual"] = number(r.invariance_residual);
  j["min_im_restriction"] = number(r.min_im_restriction);
  j["maximal"] = r.maximal;
  j["c_bound"] = number(r.c_bound);
  j["cauchy_converged"] = r.cauchy_converged;
  j["cauchy_tail_estimate"] = number(r.cauchy_tail_estimate);
  j["estimate10"] = {{"eps", number(r.estimate10.eps)},           {"A_plus_norm", number(r.estimate10.a_plus_norm)},
                     {"lower_bound", number(r.estimate10.lower_bound)}, {"min_rayleigh", number(r.estimate10.min_rayleigh)},
                     {"slack", number(r.estimate10.slack)},       {"holds", r.estimate10.holds}};
  j["estimate11"] = {{"gamma", number(r.estimate11.gamma)},   {"S_norm", number(r.estimate11.s_norm)},
                     {"mu_abs", number(r.estimate11.mu_abs)}, {"bound", number(r.estimate11.bound)},
                     {"slack", number(r.estimate11.slack)},   {"applicable", r.estimate11.applicable},
                     {"holds", r.estimate11.holds}};
  json trace = json::array();
  for (const auto& c : r.convergence_trace) {
    trace.push_back({{"n", c.n},
                     {"eps", c.eps},
                     {"K_norm", number(c.k_norm)},
                     {"K_step", number(c.k_step)},
                     {"K_to_full", number(c.k_to_full)},
                     {"L_norm", number(c.l_norm)},
                     {"L_bound", number(c.l_bound)},
                     {"min_im_restriction", number(c.min_im_restriction)},
                     {"riccati_residual", number(c.riccati_residual)},
                     {"invariance_residual", number(c.invariance_residual)},
                     {"quadrature_nodes", c.quadrature_nodes}});
  }
  j["convergence_trace"] = std::move(trace);
  if (r.stability) {
    j["stability"] = {{"distances_decreasing", r.stability->distances_decreasing},
                      {"limit_min_gap", number(r.stability->limit_min_gap)},
                      {"limit_spectrum_avoids_region", r.stability->limit_spectrum_avoids_region}};
  }
  j["stability_hypothesis_violated"] = r.stability_hypothesis_violated;
  j["acceptance_triple"] = r.acceptance_triple();
  return j.dump(2) + "\n";
}

bool acceptance_triple_from_json(std::string_view report_json) {
  try {
    const json j = json::parse(report_json);
    auto get = [&](const char* key) {
      const json& v = j.at(key);
      return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
    };
    SolveReport r;
    r.k_norm = get("K_norm");
    r.invariance_residual = get("invariance_residual");
    r.a_norm = get("A_norm");
    r.min_im_restriction = get("min_im_restriction");
    return r.acceptance_triple();
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidArgument, std::string("report: ") + e.what());
  }
}

std::string spectrum_to_json(const SpectrumOutput& s) {
  json j;
  j["spectrum_A"] = spectrum_json(sorted_spectrum(s.spectrum_a));
  j["spectrum_restriction"] =
      s.spectrum_restriction ? spectrum_json(sorted_spectrum(*s.spectrum_restriction)) : json(nullptr);
  j["contour_used"] = {{"radius", s.contour_radius}, {"nodes", s.contour_nodes}, {"rule", s.contour_rule}};
  if (s.g_decay) {
    json pts = json::array();
    for (const auto& pt : s.g_decay->points) pts.push_back({{"height", pt.height}, {"g_norm", pt.g_norm}});
    j["g_decay_profile"] = {{"points", std::move(pts)},
                            {"envelope_ok", s.g_decay->envelope_ok},
                            {"horizon_ok", s.g_decay->horizon_ok}};
  } else {
    j["g_decay_profile"] = nullptr;
  }
  return j.dump(2) + "\n";
}

std::string suite_to_json(const SuiteReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json checks = json::object();
    for (const auto& [k, v] : row.checks) checks[k] = v;
    json jr = {{"seed", row.spec.seed},
               {"p", row.spec.p},
               {"m", row.spec.m},
               {"margin", row.spec.margin},
               {"anti_dissipative", row.spec.anti_dissipative},
               {"measured_margin", number(row.measured_margin)},
               {"status", row.status},
               {"pass", row.pass},
               {"K_norm", number(row.k_norm)},
               {"riccati_residual", number(row.riccati_residual)},
               {"invariance_residual", number(row.invariance_residual)},
               {"min_im_restriction", number(row.min_im_restriction)},
               {"estimate10_slack", number(row.estimate10_slack)},
               {"estimate11_slack", number(row.estimate11_slack)},
               {"g_bound_ratio", number(row.g_bound_ratio)},
               {"factorization_residual", number(row.factorization_residual)},
               {"identity_residual", number(row.identity_residual)},
               {"asymptotics_c_ratio", number(row.asymptotics_c_ratio)},
               {"cauchy_tail_estimate", number(row.cauchy_tail_estimate)},
               {"k_steps_monotone", row.k_steps_monotone_after_burn_in},
               {"checks", std::move(checks)}};
    if (row.offending_matrix) jr["offending_matrix"] = matrix_json(*row.offending_matrix);
    rows.push_back(std::move(jr));
  }
  json j = {{"instances", r.rows.size()},
            {"failures", r.failures},
            {"no_cauchy_convergence", r.no_cauchy},
            {"pass", r.pass()},
            {"worst", {{"riccati_residual", number(r.worst_riccati)},
                       {"min_im_restriction", number(r.worst_min_im)},
                       {"estimate10_slack", number(r.worst_estimate10_slack)},
                       {"estimate11_slack", number(r.worst_estimate11_slack)},
                       {"g_bound_ratio", number(r.worst_g_bound_ratio)}}},
            {"rows", std::move(rows)}};
  return j.dump(2) + "\n";
}

std::string csv_row(const PropertyRow& row) {
  std::ostringstream os;
  os << row.spec.seed << ',' << row.spec.p << ',' << row.spec.m << ',' << fmt(row.spec.margin) << ','
     << fmt(row.k_norm) << ',' << fmt(row.riccati_residual) << ',' << fmt(row.invariance_residual) << ','
     << fmt(row.min_im_restriction) << ',' << fmt(row.estimate10_slack) << ',' << fmt(row.estimate11_slack) << ','
     << fmt(row.g_bound_ratio);
  return os.str();
}

std::string suite_to_csv(const SuiteReport& r) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& row : r.rows) out += csv_row(row) + '\n';
  return out;
}

}  // namespace krein::io
