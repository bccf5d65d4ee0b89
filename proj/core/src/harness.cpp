#include "krein/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "krein/parallel.hpp"

namespace krein {

void InstanceSpec::validate() const {
  if (p < 1 || m < 1) fail(ErrorKind::InvalidArgument, "instance dimensions must be >= 1");
  if (!(margin >= 0.0) || !std::isfinite(margin)) fail(ErrorKind::InvalidArgument, "margin must be >= 0");
  if (!(a22_decay >= 0.0) || !(coupling_scale >= 0.0) || !(hermitian_scale >= 0.0) || !(real_scale >= 0.0)) {
    fail(ErrorKind::InvalidArgument, "instance scales must be >= 0");
  }
}

BlockOperator random_dissipative(const InstanceSpec& spec) {
  spec.validate();
  const Eigen::Index p = spec.p;
  const Eigen::Index n = spec.p + spec.m;
  CounterRng rng(spec.seed, 0x4B524549);  // stream tag

  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  const CMatrix x = rng.ginibre(n, n) * norm;
  CMatrix h = spec.hermitian_scale * (x * x.adjoint());
  const CMatrix r0 = rng.ginibre(n, n) * norm;
  CMatrix r = spec.real_scale * 0.5 * (r0 + r0.adjoint());

  auto scale_coupling = [&](CMatrix& mtx) {
    mtx.topRightCorner(p, spec.m) *= spec.coupling_scale;
    mtx.bottomLeftCorner(spec.m, p) *= spec.coupling_scale;
  };
  scale_coupling(h);
  scale_coupling(r);
  h = 0.5 * (h + h.adjoint());
  r = 0.5 * (r + r.adjoint());
  // The decay term enters H before the shift, so lambda_min(H) = margin exactly.
  for (Eigen::Index k = 0; k < spec.m; ++k) {
    h(p + k, p + k) += spec.a22_decay * static_cast<double>(k + 1);
  }
  const double lo = numerics::hermitian_min_eigenvalue(h);
  h.diagonal().array() += spec.margin - lo;

  const KreinStructure s(spec.p, spec.m);
  CMatrix a = s.apply_signature(r + kI * h);
  if (spec.anti_dissipative) a = -a;
  return BlockOperator::decompose(a, s);
}

bool monotone_after_burn_in(const std::vector<double>& steps, int burn_in) {
  for (int start = 0; start <= burn_in; ++start) {
    bool ok = true;
    for (std::size_t k = start + 1; k < steps.size(); ++k) {
      const double floor = 1e-13;
      if (steps[k] > steps[k - 1] && steps[k] > floor) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

std::vector<cplx> upper_half_plane_samples(CounterRng& rng, int count, double scale) {
  std::vector<cplx> out;
  for (int k = 0; k < count; ++k) {
    const double re = scale * (2.0 * rng.uniform() - 1.0) * 2.0;
    // Every fifth sample sits on the real axis (closed half-plane).
    const double im = (k % 5 == 0) ? 0.0 : scale * std::pow(10.0, 2.0 * rng.uniform() - 1.0);
    out.emplace_back(re, im);
  }
  return out;
}

namespace {

double log_abs_det(const CMatrix& m) {
  Eigen::PartialPivLU<CMatrix> lu(m);
  const CMatrix& f = lu.matrixLU();
  double s = 0.0;
  for (Eigen::Index k = 0; k < f.rows(); ++k) s += std::log(std::abs(f(k, k)));
  return s;
}

// det(A - l) = det(A22 - l) det(S(l) - l) away from sigma(A22), and S(l) - l is
// singular at eigenvalues of A in C+.
bool resolvent_set_equivalence(const BlockOperator& a, CounterRng& rng, double scale) {
  const CMatrix full = a.assemble();
  for (int k = 0; k < 4; ++k) {
    const cplx lambda(scale * (2.0 * rng.uniform() - 1.0), scale * (0.1 + rng.uniform()));
    CMatrix al = full;
    al.diagonal().array() -= lambda;
    CMatrix a22l = a.a22();
    a22l.diagonal().array() -= lambda;
    CMatrix sl = transfer_s(a, lambda);
    sl.diagonal().array() -= lambda;
    const double lhs = log_abs_det(al);
    const double rhs = log_abs_det(a22l) + log_abs_det(sl);
    if (std::abs(lhs - rhs) > 1e-8 * (1.0 + std::abs(lhs))) return false;
  }
  const CVector ev = numerics::eigenvalues(full);
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (ev(k).imag() <= 1e-6) continue;
    CMatrix sl;
    try {
      sl = transfer_s(a, ev(k));
    } catch (const Error&) {
      continue;  // lambda also in sigma(A22)
    }
    sl.diagonal().array() -= ev(k);
    if (numerics::sigma_min(sl) > 1e-6 * (1.0 + numerics::operator_norm(sl))) return false;
  }
  return true;
}

}  // namespace

PropertyRow evaluate_instance(const InstanceSpec& spec, const SolverConfig& cfg, const SuiteOptions& opt) {
  return evaluate_operator(random_dissipative(spec), spec, cfg, opt);
}

PropertyRow evaluate_operator(const BlockOperator& a, const InstanceSpec& spec, const SolverConfig& cfg,
                              const SuiteOptions& opt) {
  PropertyRow row;
  row.spec = spec;
  row.measured_margin = dissipativity_margin(a);
  CounterRng rng(spec.seed, 0x5355495445);
  const double scale = 1.0 + a.norm();

  auto fail_row = [&](const std::string& status) {
    row.status = status;
    row.pass = false;
    row.offending_matrix = a.assemble();
    return row;
  };

  SolveReport rep;
  try {
    rep = solve_theorem(a, cfg);
  } catch (const NoCauchyConvergenceError& e) {
    rep = e.report();
    row.status = "NoCauchyConvergence";
  } catch (const Error& e) {
    return fail_row(std::string(to_string(e.kind())));
  }

  row.k_norm = rep.k_norm;
  row.riccati_residual = rep.riccati_residual;
  row.invariance_residual = rep.invariance_residual;
  row.min_im_restriction = rep.min_im_restriction;
  row.cauchy_tail_estimate = rep.cauchy_tail_estimate;
  row.checks["acceptance_triple"] = rep.acceptance_triple();
  row.checks["maximal"] = rep.maximal;
  row.checks["riccati"] = rep.riccati_ok;

  std::vector<double> steps;
  bool l_chain = true;
  bool uniformly_positive_cells = true;
  for (const auto& tc : rep.convergence_trace) {
    l_chain = l_chain && tc.l_bound_ok;
    uniformly_positive_cells = uniformly_positive_cells && tc.k_norm < 1.0 && tc.min_im_restriction > 0.0;
    if (tc.n == spec.p && !std::isnan(tc.k_step)) steps.push_back(tc.k_step);
  }
  row.checks["l_norm_chain"] = l_chain;
  row.checks["uniform_positivity_cells"] = uniformly_positive_cells;
  row.k_steps_monotone_after_burn_in = monotone_after_burn_in(steps, opt.burn_in);

  // Closure factorization at random shifts.
  double fact = 0.0;
  for (int k = 0; k < opt.factorization_mu_samples; ++k) {
    const cplx mu(scale * (2.0 * rng.uniform() - 1.0), scale * (0.05 + 2.0 * rng.uniform()));
    fact = std::max(fact, factorization_residual(a, mu));
  }
  row.factorization_residual = fact;
  row.checks["factorization"] = fact <= 1e-9;

  double ident = 0.0;
  for (int k = 0; k < opt.identity_samples; ++k) {
    const cplx lambda(scale * (2.0 * rng.uniform() - 1.0), scale * (0.05 + rng.uniform()));
    const cplx mu(scale * (2.0 * rng.uniform() - 1.0), scale * (0.05 + rng.uniform()));
    const double eps = 1e-3 + (1.0 - 1e-3) * rng.uniform();
    ident = std::max(ident, g_resolvent_identity_residual(a, lambda, mu));
    const auto sh = shift_identity_residuals(a, mu, eps);
    ident = std::max({ident, sh.g_shift, sh.s_shift});
  }
  row.identity_residual = ident;
  row.checks["identities"] = ident <= 1e-9;

  // Rayleigh, A+ norm and G bounds on the eps-regularized operators.
  row.estimate10_slack = std::numeric_limits<double>::infinity();
  row.estimate11_slack = std::numeric_limits<double>::infinity();
  bool est10 = true, est11 = true, gbound = true;
  for (double eps : opt.regularizations) {
    const BlockOperator reg = regularize(a, eps);
    const SolveReport r = solve_uniformly_dissipative(reg, cfg);
    row.estimate10_slack = std::min(row.estimate10_slack, r.estimate10.slack);
    est10 = est10 && r.estimate10.holds;
    if (r.estimate11.applicable) {
      row.estimate11_slack = std::min(row.estimate11_slack, r.estimate11.slack);
      est11 = est11 && r.estimate11.holds;
    }
    const auto samples = upper_half_plane_samples(rng, opt.g_bound_samples, scale);
    const GBoundReport g = g_uniform_bound_check(reg, dissipativity_margin(reg), samples);
    row.g_bound_ratio = std::max(row.g_bound_ratio, g.max_ratio);
    gbound = gbound && g.holds;
  }
  row.checks["estimate10"] = est10;
  row.checks["estimate11"] = est11;
  row.checks["g_uniform_bound"] = gbound;

  const BlockOperator asym_op = row.measured_margin >= 1e-3 ? a : regularize(a, 0.1);
  const double r0 = 4.0 * std::max(1.0, asym_op.norm());
  AsymptoticsConfig acfg;
  acfg.seed = spec.seed;
  const AsymptoticsReport asym = resolvent_asymptotics_check(asym_op, {r0, 2.0 * r0}, acfg);
  row.asymptotics_c_ratio = asym.c_ratio;
  row.checks["asymptotics"] = asym.c_stable && asym.identity_ok;

  row.checks["resolvent_set_equivalence"] = resolvent_set_equivalence(a, rng, scale);
  row.checks["maximal_dissipativity"] = maximal_dissipativity_check(a).pass;

  row.pass = row.status == "ok";
  for (const auto& [name, ok] : row.checks) row.pass = row.pass && ok;
  if (!row.pass) row.offending_matrix = a.assemble();
  return row;
}

SuiteReport run_property_suite(const std::vector<InstanceSpec>& specs, const SolverConfig& cfg,
                               const SuiteOptions& opt) {
  SuiteReport rep;
  rep.rows.resize(specs.size());
  parallel_for(specs.size(), [&](std::size_t i) { rep.rows[i] = evaluate_instance(specs[i], cfg, opt); });
  rep.worst_estimate10_slack = std::numeric_limits<double>::infinity();
  rep.worst_estimate11_slack = std::numeric_limits<double>::infinity();
  rep.worst_min_im = std::numeric_limits<double>::infinity();
  for (const auto& row : rep.rows) {
    if (!row.pass) ++rep.failures;
    if (row.status == "NoCauchyConvergence") ++rep.no_cauchy;
    if (row.status != "ok" && row.status != "NoCauchyConvergence") continue;
    rep.worst_riccati = std::max(rep.worst_riccati, row.riccati_residual);
    rep.worst_min_im = std::min(rep.worst_min_im, row.min_im_restriction);
    rep.worst_estimate10_slack = std::min(rep.worst_estimate10_slack, row.estimate10_slack);
    rep.worst_estimate11_slack = std::min(rep.worst_estimate11_slack, row.estimate11_slack);
    rep.worst_g_bound_ratio = std::max(rep.worst_g_bound_ratio, row.g_bound_ratio);
  }
  return rep;
}

}  // namespace krein
