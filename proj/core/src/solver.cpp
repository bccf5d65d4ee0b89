#include "krein/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "krein/parallel.hpp"

namespace krein {

namespace {

double relative_riccati_scale(const CMatrix& s, cplx mu) { return numerics::operator_norm(s) + std::abs(mu); }

CMatrix graph_riccati_defect(const BlockOperator& a, const CMatrix& k) {
  return a.a21() + a.a22() * k - k * (a.a11() + a.a12() * k);
}

double min_imag(const std::vector<cplx>& v) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& z : v) m = std::min(m, z.imag());
  return m;
}

std::vector<cplx> to_vector(const CVector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

void SolverConfig::validate() const {
  if (eps_schedule.empty()) fail(ErrorKind::InvalidArgument, "eps schedule must not be empty");
  for (std::size_t k = 0; k < eps_schedule.size(); ++k) {
    const double e = eps_schedule[k];
    if (!(e > 0.0 && e <= 1.0)) fail(ErrorKind::InvalidArgument, "eps schedule entries must lie in (0, 1]");
    if (k > 0 && !(e < eps_schedule[k - 1])) fail(ErrorKind::InvalidArgument, "eps schedule must strictly decrease");
  }
  if (eps_schedule.back() > 1e-4) fail(ErrorKind::InvalidArgument, "last eps must be <= 1e-4");
  for (std::size_t k = 0; k < galerkin_dims.size(); ++k) {
    if (galerkin_dims[k] < 1 || (k > 0 && galerkin_dims[k] <= galerkin_dims[k - 1])) {
      fail(ErrorKind::InvalidArgument, "galerkin dims must be positive and strictly increasing");
    }
  }
  if (fixed_mu && !(fixed_mu->imag() > 0.0)) fail(ErrorKind::InvalidArgument, "fixed mu must have Im mu > 0");
  if (contour_radius && !(*contour_radius > 0.0)) fail(ErrorKind::InvalidArgument, "contour radius must be positive");
}

SolverConfig default_solver_config() {
  SolverConfig cfg;
  for (int k = 0; k <= 14; ++k) cfg.eps_schedule.push_back(std::ldexp(1.0, -k));
  return cfg;
}

std::vector<Eigen::Index> resolve_galerkin_dims(const SolverConfig& cfg, Eigen::Index p) {
  std::vector<Eigen::Index> dims = cfg.galerkin_dims;
  if (dims.empty()) {
    for (Eigen::Index d : {(p + 3) / 4, (p + 1) / 2, p}) {
      if (dims.empty() || d > dims.back()) dims.push_back(d);
    }
  }
  if (dims.back() > p) fail(ErrorKind::InvalidArgument, "galerkin dims must not exceed p");
  if (dims.back() != p) dims.push_back(p);
  return dims;
}

bool SolveReport::acceptance_triple() const {
  return k_norm <= 1.0 + 1e-8 && invariance_residual <= 1e-7 * a_norm && min_im_restriction >= -1e-6;
}

BlockOperator regularize(const BlockOperator& a, double eps) {
  if (!(eps >= 0.0)) fail(ErrorKind::InvalidArgument, "regularization eps must be >= 0");
  CMatrix a11 = a.a11();
  CMatrix a22 = a.a22();
  a11.diagonal().array() += cplx(0.0, eps);
  a22.diagonal().array() -= cplx(0.0, eps);
  return BlockOperator(std::move(a11), a.a12(), a.a21(), std::move(a22));
}

CMatrix galerkin_basis(const CMatrix& phi, Eigen::Index n) {
  if (n < 1 || n > phi.cols()) fail(ErrorKind::InvalidArgument, "galerkin dimension out of range");
  numerics::require_finite(phi, "galerkin basis");
  const CMatrix cols = phi.leftCols(n);
  Eigen::ColPivHouseholderQR<CMatrix> qr(cols);
  qr.setThreshold(1e-12);
  if (qr.rank() < n) fail(ErrorKind::RankDeficientBasis, "galerkin basis columns are linearly dependent");
  // Plain Householder QR keeps the nested-span property (column j depends only on columns <= j).
  Eigen::HouseholderQR<CMatrix> nested(cols);
  return nested.householderQ() * CMatrix::Identity(cols.rows(), n);
}

BlockOperator galerkin_truncate(const BlockOperator& a, Eigen::Index n, const CMatrix& basis_plus) {
  const auto p = a.structure().p();
  if (basis_plus.rows() != p) fail(ErrorKind::DimensionMismatch, "galerkin basis must have p rows");
  const CMatrix b = galerkin_basis(basis_plus, n);
  return BlockOperator(b.adjoint() * a.a11() * b, b.adjoint() * a.a12(), a.a21() * b, a.a22());
}

RiccatiResidual riccati_residual(const BlockOperator& a, const AngleOperator& k, cplx mu) {
  if (!(k.structure() == a.structure())) fail(ErrorKind::DimensionMismatch, "angle operator structure");
  const CMatrix& km = k.matrix();
  CMatrix l = a.a21() + a.a22() * km - mu * km;
  const CMatrix g = transfer_g(a, mu);
  CMatrix s_shift = transfer_s(a, mu);
  s_shift.diagonal().array() -= mu;
  const CMatrix rhs = km * (s_shift + g * l);
  return {numerics::operator_norm(l - rhs), std::move(l)};
}

CMatrix restriction_matrix(const BlockOperator& a, const AngleOperator& k, cplx mu) {
  const RiccatiResidual rr = riccati_residual(a, k, mu);
  return transfer_s(a, mu) + transfer_g(a, mu) * rr.l_op;
}

cplx select_mu(const BlockOperator& a, const std::vector<double>& shifts) {
  cplx mu = default_mu(a);
  for (int it = 0; it < 80; ++it) {
    double worst = 0.0;
    for (double e : shifts) worst = std::max(worst, numerics::operator_norm(transfer_g(a, mu + cplx(0.0, e))));
    if (worst < 0.5) return mu;
    mu *= 2.0;
  }
  fail(ErrorKind::NoConvergence, "could not find mu with ||G(mu + i eps)|| < 1/2");
}

PolishResult polish_riccati(const BlockOperator& a, const CMatrix& k0, int max_iterations) {
  PolishResult best{k0, numerics::operator_norm(graph_riccati_defect(a, k0)), 0};
  CMatrix k = k0;
  double current = best.residual;
  int stalls = 0;
  for (int it = 1; it <= max_iterations; ++it) {
    const CMatrix r = graph_riccati_defect(a, k);
    // Linearization: (A22 - K A12) dK - dK (A11 + A12 K) = -R(K).
    CMatrix dk;
    try {
      dk = numerics::solve_sylvester(a.a22() - k * a.a12(), a.a11() + a.a12() * k, -r);
    } catch (const Error&) {
      break;
    }
    if (!dk.allFinite()) break;
    k += dk;
    const double res = numerics::operator_norm(graph_riccati_defect(a, k));
    if (res < best.residual) {
      best = {k, res, it};
      stalls = 0;
    } else if (++stalls >= 3) {
      break;
    }
    if (res <= 1e-15 * (1.0 + a.norm()) || res >= current * 1e3) break;
    current = res;
  }
  return best;
}

SolveReport solve_uniformly_dissipative(const BlockOperator& a, const SolverConfig& cfg, std::optional<cplx> mu) {
  const auto& s = a.structure();
  SolveReport rep;
  rep.structure = s;
  rep.margin = dissipativity_margin(a);
  if (!(rep.margin > 0.0)) {
    fail(ErrorKind::NotUniformlyDissipative, "dissipativity margin " + std::to_string(rep.margin) + " is not positive");
  }
  const CMatrix full = a.assemble();
  rep.a_norm = numerics::operator_norm(full);
  rep.mu = mu ? *mu : (cfg.fixed_mu ? *cfg.fixed_mu : select_mu(a, {0.0}));

  Contour contour = cfg.contour_radius ? Contour{} : auto_contour(full, cfg.contour_nodes);
  if (cfg.contour_radius) contour.radius = *cfg.contour_radius;
  contour.nodes = cfg.contour_nodes;
  contour.rule = cfg.rule;
  contour.check_convergence = cfg.check_quadrature_convergence;
  const ProjectorReport q = riesz_projector_quadrature(full, contour);
  const Subspace l = invariant_subspace_from_projector(full, q, s);
  if (l.dim() != s.p()) {
    fail(ErrorKind::NotMaximal, "range of Q+ has dimension " + std::to_string(l.dim()) + ", expected p");
  }
  const AngleOperator k = angle_operator_from_subspace(l);
  rep.k = k.matrix();
  rep.k_norm = k.norm();

  const RiccatiResidual rr = riccati_residual(a, k, rep.mu);
  rep.l_op = rr.l_op;
  rep.riccati_residual = rr.residual;
  const SchurData sd = schur_data(a, rep.mu);
  rep.s_norm = numerics::operator_norm(sd.s);
  rep.restriction = sd.s + sd.g * rep.l_op;
  rep.restriction_spectrum = to_vector(numerics::eigenvalues(rep.restriction));
  rep.min_im_restriction = min_imag(rep.restriction_spectrum);
  rep.invariance_residual = invariance_residual(full, subspace_from_angle_operator(k));
  rep.maximal = !maximality_witness(subspace_from_angle_operator(k)).has_value();

  // Rayleigh quotient and A+ norm bounds on the Riesz subspace L.
  const CMatrix& b = l.basis();
  const CMatrix a_plus = b.adjoint() * full * b;
  auto& e10 = rep.estimate10;
  e10.eps = rep.margin;
  e10.a_plus_norm = numerics::operator_norm(a_plus);
  e10.lower_bound = 2.0 * e10.eps / (std::numbers::pi * e10.a_plus_norm);
  e10.min_rayleigh = numerics::hermitian_min_eigenvalue(l.gram());
  e10.slack = e10.min_rayleigh - e10.lower_bound;
  e10.holds = e10.slack >= -1e-8;

  auto& e11 = rep.estimate11;
  e11.gamma = numerics::operator_norm(sd.g);
  e11.s_norm = numerics::operator_norm(a.a11() - sd.g * a.a21());
  e11.mu_abs = std::abs(rep.mu);
  e11.a_plus_norm = e10.a_plus_norm;
  e11.applicable = e11.gamma < 1.0;
  if (e11.applicable) {
    e11.bound = 2.0 * (e11.s_norm + e11.gamma / (1.0 - e11.gamma) * (e11.s_norm + e11.mu_abs));
    e11.slack = e11.bound - e11.a_plus_norm;
    e11.holds = e11.slack >= -1e-8;
  } else {
    e11.bound = std::numeric_limits<double>::infinity();
    e11.slack = std::numeric_limits<double>::infinity();
    e11.holds = true;
  }

  rep.k_norm_ok = rep.k_norm < 1.0;
  rep.riccati_ok = rep.riccati_residual <= cfg.tol.riccati_tol * relative_riccati_scale(sd.s, rep.mu);
  rep.invariance_ok = rep.invariance_residual <= cfg.tol.invariance_tol * rep.a_norm;
  rep.spectrum_ok = rep.min_im_restriction > 0.0;
  return rep;
}

SolveReport solve_theorem(const BlockOperator& a, const SolverConfig& cfg) {
  cfg.validate();
  const auto& s = a.structure();
  const auto p = s.p();
  const double margin = dissipativity_margin(a);
  if (margin < -cfg.tol.dissipativity_tol) {
    fail(ErrorKind::NotDissipative, "dissipativity margin " + std::to_string(margin) + " is negative");
  }
  if (condition_i_margin(a) < -cfg.tol.dissipativity_tol) {
    fail(ErrorKind::ConditionIFailed, "-A22 is not dissipative in H-");
  }

  std::vector<double> shifts = cfg.eps_schedule;
  shifts.push_back(0.0);
  const cplx mu = cfg.fixed_mu ? *cfg.fixed_mu : select_mu(a, shifts);
  double c_bound = 0.0;
  for (double e : shifts) {
    CMatrix se = transfer_s(a, mu + cplx(0.0, e));
    se.diagonal().array() += cplx(0.0, e);
    c_bound = std::max(c_bound, numerics::operator_norm(se));
  }
  const double l_bound = 2.0 * (c_bound + std::abs(mu));

  const CMatrix phi = cfg.galerkin_basis ? *cfg.galerkin_basis : CMatrix::Identity(p, p);
  if (phi.rows() != p || phi.cols() < p) fail(ErrorKind::DimensionMismatch, "galerkin basis must be p x p");
  const auto dims = resolve_galerkin_dims(cfg, p);
  const auto& sched = cfg.eps_schedule;
  const std::size_t ne = sched.size();

  struct CellResult {
    CMatrix k_lifted;    // m x p after zero extension
    CMatrix restriction; // T(eps) = S' + G' L'
    SolveReport report;
  };
  std::vector<CellResult> cells(dims.size() * ne);
  std::vector<CMatrix> bases(dims.size());
  for (std::size_t d = 0; d < dims.size(); ++d) bases[d] = galerkin_basis(phi, dims[d]);

  parallel_for(cells.size(), [&](std::size_t idx) {
    const std::size_t d = idx / ne;
    const std::size_t e = idx % ne;
    const BlockOperator truncated = galerkin_truncate(a, dims[d], phi);
    const BlockOperator cell_op = regularize(truncated, sched[e]);
    SolveReport r = solve_uniformly_dissipative(cell_op, cfg, mu);
    cells[idx].k_lifted = r.k * bases[d].adjoint();
    cells[idx].restriction = r.restriction;
    cells[idx].report = std::move(r);
  });

  SolveReport rep;
  rep.structure = s;
  rep.mu = mu;
  rep.margin = margin;
  rep.c_bound = c_bound;
  const std::size_t full_row = dims.size() - 1;
  for (std::size_t d = 0; d < dims.size(); ++d) {
    for (std::size_t e = 0; e < ne; ++e) {
      const auto& cell = cells[d * ne + e];
      TraceCell tc;
      tc.n = dims[d];
      tc.eps = sched[e];
      tc.k_norm = cell.report.k_norm;
      if (e > 0) tc.k_step = numerics::operator_norm(cell.k_lifted - cells[d * ne + e - 1].k_lifted);
      tc.k_to_full = numerics::operator_norm(cell.k_lifted - cells[full_row * ne + e].k_lifted);
      tc.l_norm = numerics::operator_norm(cell.report.l_op);
      tc.l_bound = l_bound;
      tc.l_bound_ok = tc.l_norm <= l_bound * (1.0 + 1e-10);
      tc.min_im_restriction = cell.report.min_im_restriction;
      tc.riccati_residual = cell.report.riccati_residual;
      tc.invariance_residual = cell.report.invariance_residual;
      tc.quadrature_nodes = 0;
      rep.convergence_trace.push_back(tc);
    }
  }
  const auto& finest = cells[full_row * ne + ne - 1];
  rep.estimate10 = finest.report.estimate10;
  rep.estimate11 = finest.report.estimate11;

  // Cauchy tail of K(eps) on the untruncated row.
  std::vector<double> steps;
  for (std::size_t e = 1; e < ne; ++e) steps.push_back(rep.convergence_trace[full_row * ne + e].k_step);
  rep.cauchy_converged = true;
  rep.cauchy_tail_estimate = 0.0;
  if (!steps.empty()) {
    const double last = steps.back();
    if (last > 1e-12) {
      const std::size_t w = std::min<std::size_t>(cfg.tol.cauchy_window, steps.size());
      bool monotone = true;
      for (std::size_t k = steps.size() - w + 1; k < steps.size(); ++k) {
        if (steps[k] > steps[k - 1]) monotone = false;
      }
      const double ratio = steps.size() >= 2 ? last / steps[steps.size() - 2] : 1.0;
      rep.cauchy_tail_estimate =
          (monotone && ratio < 1.0) ? last * ratio / (1.0 - ratio) : std::numeric_limits<double>::infinity();
      rep.cauchy_converged = rep.cauchy_tail_estimate <= cfg.tol.cauchy_tol;
    }
  }

  // eps -> 0: start from K(eps_last) and refine on the unregularized equation.
  CMatrix k = finest.k_lifted;
  rep.unpolished_riccati_residual = numerics::operator_norm(graph_riccati_defect(a, k));
  if (cfg.polish) {
    const PolishResult pr = polish_riccati(a, k, cfg.polish_max_iterations);
    if (numerics::operator_norm(pr.k) <= 1.0 + cfg.tol.norm_slack) {
      k = pr.k;
      rep.polish_iterations = pr.iterations;
    }
  }

  const AngleOperator kop(s, k);
  const CMatrix full = a.assemble();
  rep.a_norm = numerics::operator_norm(full);
  rep.k = k;
  rep.k_norm = kop.norm();
  const RiccatiResidual rr = riccati_residual(a, kop, mu);
  rep.l_op = rr.l_op;
  rep.riccati_residual = rr.residual;
  const SchurData sd = schur_data(a, mu);
  rep.s_norm = numerics::operator_norm(sd.s);
  rep.restriction = sd.s + sd.g * rep.l_op;
  rep.restriction_spectrum = to_vector(numerics::eigenvalues(rep.restriction));
  rep.min_im_restriction = min_imag(rep.restriction_spectrum);
  if (rep.k_norm <= 1.0 + kAngleNormSlack) {
    const Subspace graph = subspace_from_angle_operator(kop);
    rep.invariance_residual = invariance_residual(full, graph);
    rep.maximal = !maximality_witness(graph).has_value();
  } else {
    rep.invariance_residual = std::numeric_limits<double>::infinity();
    rep.maximal = false;
  }

  // Spectral stability along T(eps_k) -> T(0) for the lower half-plane below -spec_slack.
  std::vector<CMatrix> seq;
  for (std::size_t e = 0; e < ne; ++e) seq.push_back(cells[full_row * ne + e].restriction);
  const double big = 1e3 * (1.0 + rep.a_norm + std::abs(mu));
  const Region lower = Rectangle{-big, big, -big, -cfg.tol.spec_slack};
  try {
    rep.stability = spectral_stability_check(seq, rep.restriction, lower);
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::HypothesisViolated) throw;
    rep.stability_hypothesis_violated = true;
  }

  rep.k_norm_ok = rep.k_norm <= 1.0 + cfg.tol.norm_slack;
  rep.riccati_ok = rep.riccati_residual <= cfg.tol.riccati_tol * relative_riccati_scale(sd.s, mu);
  rep.invariance_ok = rep.invariance_residual <= cfg.tol.invariance_tol * rep.a_norm;
  rep.spectrum_ok = rep.min_im_restriction >= -cfg.tol.spec_slack;

  if (!rep.cauchy_converged) {
    throw NoCauchyConvergenceError(
        "K(eps) tail did not stabilize (estimated distance " + std::to_string(rep.cauchy_tail_estimate) + ")",
        std::move(rep));
  }
  return rep;
}

MaximalDissipativityReport maximal_dissipativity_check(const BlockOperator& a, double tol) {
  MaximalDissipativityReport r;
  r.margin = dissipativity_margin(a);
  const CMatrix ja = a.structure().apply_signature(a.assemble());
  const double scale = 1.0 + numerics::operator_norm(ja);
  r.min_resolvent_defect = std::numeric_limits<double>::infinity();
  for (double x : {-2.0, 0.0, 2.0}) {
    for (double y : {0.25, 1.0, 4.0}) {
      CMatrix shifted = ja;
      shifted.diagonal().array() -= cplx(x * scale, y * scale);
      r.min_resolvent_defect = std::min(r.min_resolvent_defect, numerics::sigma_min(shifted));
    }
  }
  r.pass = r.margin >= -tol && r.min_resolvent_defect > 0.0;
  return r;
}

}  // namespace krein
