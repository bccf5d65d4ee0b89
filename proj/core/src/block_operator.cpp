#include "krein/block_operator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/SVD>

#include "krein/errors.hpp"
#include "krein/random.hpp"

namespace krein {

namespace {

KreinStructure structure_of(const CMatrix& a11, const CMatrix& a22) { return {a11.rows(), a22.rows()}; }

double rel_norm_diff(const CMatrix& x, const CMatrix& y) {
  const double scale = std::max({1.0, numerics::operator_norm(x), numerics::operator_norm(y)});
  return numerics::operator_norm(x - y) / scale;
}

}  // namespace

BlockOperator::BlockOperator(CMatrix a11, CMatrix a12, CMatrix a21, CMatrix a22)
    : structure_(structure_of(a11, a22)),
      a11_(std::move(a11)),
      a12_(std::move(a12)),
      a21_(std::move(a21)),
      a22_(std::move(a22)) {
  const auto p = structure_.p();
  const auto m = structure_.m();
  if (a11_.cols() != p || a12_.rows() != p || a12_.cols() != m || a21_.rows() != m || a21_.cols() != p ||
      a22_.cols() != m) {
    fail(ErrorKind::DimensionMismatch, "block shapes must be p x p, p x m, m x p, m x m");
  }
  numerics::require_finite(a11_, "A11");
  numerics::require_finite(a12_, "A12");
  numerics::require_finite(a21_, "A21");
  numerics::require_finite(a22_, "A22");
}

BlockOperator BlockOperator::decompose(const CMatrix& a, const KreinStructure& s) {
  if (a.rows() != s.dim() || a.cols() != s.dim()) fail(ErrorKind::DimensionMismatch, "A must be (p+m) x (p+m)");
  const auto p = s.p();
  const auto m = s.m();
  return BlockOperator(a.topLeftCorner(p, p), a.topRightCorner(p, m), a.bottomLeftCorner(m, p),
                       a.bottomRightCorner(m, m));
}

CMatrix BlockOperator::assemble() const {
  const auto p = structure_.p();
  const auto m = structure_.m();
  CMatrix a(p + m, p + m);
  a.topLeftCorner(p, p) = a11_;
  a.topRightCorner(p, m) = a12_;
  a.bottomLeftCorner(m, p) = a21_;
  a.bottomRightCorner(m, m) = a22_;
  return a;
}

double dissipativity_margin(const BlockOperator& a) {
  const CMatrix ja = a.structure().apply_signature(a.assemble());
  return numerics::hermitian_min_eigenvalue(numerics::imaginary_part(ja));
}

CMatrix transfer_g(const BlockOperator& a, cplx mu) {
  // G = A12 (A22 - mu)^{-1}  <=>  G^T = (A22^T - mu)^{-1} A12^T.
  const CMatrix gt = numerics::solve_shifted(a.a22().transpose(), mu, a.a12().transpose());
  return gt.transpose();
}

CMatrix transfer_f(const BlockOperator& a, cplx mu) { return numerics::solve_shifted(a.a22(), mu, a.a21()); }

CMatrix transfer_s(const BlockOperator& a, cplx mu) { return a.a11() - a.a12() * transfer_f(a, mu); }

SchurData schur_data(const BlockOperator& a, cplx mu, bool allow_closed_half_plane) {
  if (allow_closed_half_plane ? mu.imag() < 0.0 : mu.imag() <= 0.0) {
    fail(ErrorKind::InvalidArgument, "Schur data needs mu in the upper half-plane");
  }
  SchurData d;
  d.mu = mu;
  d.f = transfer_f(a, mu);
  d.g = transfer_g(a, mu);
  d.s = a.a11() - a.a12() * d.f;
  return d;
}

double factorization_residual(const BlockOperator& a, cplx mu) {
  const SchurData d = schur_data(a, mu, true);
  const auto& s = a.structure();
  const auto p = s.p();
  const auto m = s.m();
  CMatrix upper = CMatrix::Identity(p + m, p + m);
  upper.topRightCorner(p, m) = d.g;
  CMatrix middle = CMatrix::Zero(p + m, p + m);
  middle.topLeftCorner(p, p) = d.s - mu * CMatrix::Identity(p, p);
  middle.bottomRightCorner(m, m) = a.a22() - mu * CMatrix::Identity(m, m);
  CMatrix lower = CMatrix::Identity(p + m, p + m);
  lower.bottomLeftCorner(m, p) = d.f;
  CMatrix rebuilt = upper * middle * lower;
  rebuilt.diagonal().array() += mu;
  const CMatrix full = a.assemble();
  const double scale = std::max(numerics::operator_norm(full), std::numeric_limits<double>::min());
  return numerics::operator_norm(full - rebuilt) / scale;
}

cplx default_mu(const BlockOperator& a) { return cplx(0.0, 1.0 + numerics::operator_norm(a.a22())); }

double condition_i_margin(const BlockOperator& a) {
  return numerics::hermitian_min_eigenvalue(numerics::imaginary_part(-a.a22()));
}

ConditionsReport check_theorem_conditions(const BlockOperator& a, cplx mu, const ConditionsConfig& cfg) {
  if (mu.imag() <= 0.0) fail(ErrorKind::InvalidArgument, "conditions are evaluated at mu with Im mu > 0");
  ConditionsReport r;
  r.mu = mu;
  r.condition_i.value = condition_i_margin(a);
  r.condition_i.pass = r.condition_i.value >= -cfg.tol;

  const SchurData d = schur_data(a, mu);
  r.condition_ii.value = numerics::operator_norm(d.f);
  r.condition_ii.pass = r.condition_ii.value <= cfg.f_cap;

  Eigen::JacobiSVD<CMatrix> svd(d.g);
  const auto& sv = svd.singularValues();
  r.condition_iii.value = sv.size() ? sv(0) : 0.0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    const double rel = sv(0) > 0.0 ? sv(k) / sv(0) : 0.0;
    r.g_singular_profile.push_back(rel);
    if (rel > cfg.g_decay_threshold) ++r.g_effective_rank;
  }
  r.condition_iii.pass = r.g_effective_rank <= cfg.g_max_effective_rank;

  r.condition_iv.value = numerics::operator_norm(d.s);
  r.condition_iv.pass = r.condition_iv.value <= cfg.s_cap;
  return r;
}

DecayProfile g_decay_profile(const BlockOperator& a, const std::vector<double>& heights, const DecayConfig& cfg) {
  if (heights.empty()) fail(ErrorKind::InvalidArgument, "decay profile needs at least one height");
  for (std::size_t k = 0; k < heights.size(); ++k) {
    if (!(heights[k] > 0.0) || (k > 0 && !(heights[k] > heights[k - 1]))) {
      fail(ErrorKind::InvalidArgument, "heights must be positive and strictly increasing");
    }
  }
  DecayProfile out;
  for (double h : heights) {
    const cplx mu = cfg.mu0 + cplx(0.0, h);
    out.points.push_back({h, numerics::operator_norm(transfer_g(a, mu))});
  }
  out.envelope_ok = out.points.back().g_norm <= out.points.front().g_norm;
  out.horizon_ok = !(out.points.back().height > cfg.horizon) || out.points.back().g_norm <= cfg.tol;
  return out;
}

GBoundReport g_uniform_bound_check(const BlockOperator& a, double eps, const std::vector<cplx>& samples) {
  if (!(eps > 0.0)) fail(ErrorKind::InvalidArgument, "uniform G bound needs eps > 0");
  GBoundReport r;
  r.eps = eps;
  const auto p = a.structure().p();
  const CMatrix full = a.assemble();
  r.a = 2.0 * numerics::operator_norm(full.leftCols(p)) * (1.0 + 1e-6);
  r.bound = 2.0 + 2.0 * r.a / eps;
  r.holds = true;
  for (const cplx& lambda : samples) {
    if (lambda.imag() < 0.0) fail(ErrorKind::InvalidArgument, "samples must lie in the closed upper half-plane");
    double g = 0.0;
    try {
      g = numerics::operator_norm(transfer_g(a, lambda));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::SingularShift) {
        fail(ErrorKind::SingularShift, "G is singular inside the closed upper half-plane despite eps > 0");
      }
      throw;
    }
    r.max_g_norm = std::max(r.max_g_norm, g);
    r.max_ratio = std::max(r.max_ratio, g / r.bound);
    if (g > r.bound) r.holds = false;
  }
  return r;
}

AsymptoticsReport resolvent_asymptotics_check(const BlockOperator& a, const std::vector<double>& radii,
                                              const AsymptoticsConfig& cfg) {
  if (radii.size() < 2) fail(ErrorKind::InvalidArgument, "asymptotics need at least two radii");
  for (std::size_t k = 1; k < radii.size(); ++k) {
    if (!(radii[k] > radii[k - 1]) || !(radii[0] > 0.0)) fail(ErrorKind::InvalidArgument, "radii must increase");
  }
  const auto p = a.structure().p();
  const CMatrix full = a.assemble();
  CounterRng rng(cfg.seed, 0xA5);
  AsymptoticsReport r;
  r.identity_ok = true;
  for (double radius : radii) {
    double c = 0.0;
    for (int k = 0; k < cfg.samples_per_radius; ++k) {
      // Closed upper semicircle, endpoints included.
      const double theta = std::numbers::pi * k / (cfg.samples_per_radius - 1);
      const cplx lambda = std::polar(radius, theta);
      CMatrix s = transfer_s(a, lambda);
      const CMatrix inv = numerics::solve_shifted(s, lambda, CMatrix::Identity(p, p));  // (S - l)^{-1}
      CMatrix e = inv;
      e.diagonal().array() += 1.0 / lambda;
      c = std::max(c, numerics::operator_norm(e) * std::norm(lambda));

      // Top-left block of (l - A)^{-1} against (l - S(l))^{-1} = -inv.
      const CMatrix res = -numerics::solve_shifted(full, lambda, CMatrix::Identity(full.rows(), full.rows()));
      for (int q = 0; q < cfg.probe_vectors; ++q) {
        const CVector z = rng.unit_vector(p);
        const cplx lhs = z.dot(res.topLeftCorner(p, p) * z);
        const cplx rhs = z.dot(-inv * z);
        r.max_identity_defect = std::max(r.max_identity_defect, std::abs(lhs - rhs));
      }
    }
    r.radii.push_back({radius, c});
  }
  r.identity_ok = r.max_identity_defect <= cfg.identity_tol;
  const double c_last = r.radii[r.radii.size() - 1].fitted_c;
  const double c_prev = r.radii[r.radii.size() - 2].fitted_c;
  if (c_prev == 0.0 && c_last == 0.0) {
    r.c_ratio = 1.0;
  } else {
    r.c_ratio = c_prev > 0.0 ? c_last / c_prev : std::numeric_limits<double>::infinity();
  }
  r.c_stable = r.c_ratio >= 0.25 && r.c_ratio <= 4.0;
  return r;
}

double g_resolvent_identity_residual(const BlockOperator& a, cplx lambda, cplx mu) {
  const CMatrix g_lambda = transfer_g(a, lambda);
  const CMatrix g_mu = transfer_g(a, mu);
  const CMatrix res = numerics::solve_shifted(a.a22(), lambda, CMatrix::Identity(a.a22().rows(), a.a22().rows()));
  return rel_norm_diff(g_lambda, g_mu + (lambda - mu) * g_mu * res);
}

ShiftIdentityResiduals shift_identity_residuals(const BlockOperator& a, cplx mu, double eps) {
  const cplx shifted = mu + cplx(0.0, eps);
  const CMatrix g_mu = transfer_g(a, mu);
  const CMatrix g_shift = transfer_g(a, shifted);
  const CMatrix res = numerics::solve_shifted(a.a22(), shifted, CMatrix::Identity(a.a22().rows(), a.a22().rows()));
  const CMatrix s_mu = transfer_s(a, mu);
  const CMatrix s_shift = transfer_s(a, shifted);
  const CMatrix correction = cplx(0.0, eps) * g_shift * transfer_f(a, mu);
  ShiftIdentityResiduals r;
  r.g_shift = rel_norm_diff(g_shift, g_mu + cplx(0.0, eps) * g_mu * res);
  r.s_shift = rel_norm_diff(s_shift, s_mu - correction);
  r.s_shift_printed = rel_norm_diff(s_shift, s_mu + correction);
  return r;
}

}  // namespace krein
