#include "krein/spectral_projector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "krein/errors.hpp"
#include "krein/parallel.hpp"

namespace krein {

namespace {

constexpr int kPanelOrder = 12;
constexpr double kPanelSeparation = 1.5;  // eigenvalue distance / panel half-length
constexpr int kMaxSplitDepth = 48;

struct Rule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

Rule gauss_legendre(int q) {
  Rule r;
  r.nodes.resize(q);
  r.weights.resize(q);
  for (int i = 0; i < q; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= q; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = q * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes[i] = x;
    r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

Rule trapezoid(int q) {
  Rule r;
  for (int i = 0; i <= q; ++i) {
    r.nodes.push_back(-1.0 + 2.0 * i / q);
    r.weights.push_back((i == 0 || i == q) ? 1.0 / q : 2.0 / q);
  }
  return r;
}

const Rule& panel_rule(QuadratureRule kind) {
  static const Rule gl = gauss_legendre(kPanelOrder);
  static const Rule tr = trapezoid(kPanelOrder);
  return kind == QuadratureRule::gauss_segments ? gl : tr;
}

struct Panel {
  bool arc;
  double a;
  double b;
};

double distance_to_segment(cplx z, double a, double b) {
  if (z.real() >= a && z.real() <= b) return std::abs(z.imag());
  return std::min(std::abs(z - cplx(a, 0.0)), std::abs(z - cplx(b, 0.0)));
}

double distance_to_arc(cplx z, double radius, double ta, double tb) {
  const double mod = std::abs(z);
  if (mod > 0.0) {
    const double theta = std::arg(z);
    if (theta >= ta && theta <= tb) return std::abs(radius - mod);
  }
  return std::min(std::abs(z - std::polar(radius, ta)), std::abs(z - std::polar(radius, tb)));
}

double panel_distance(const Panel& pnl, double radius, cplx z) {
  return pnl.arc ? distance_to_arc(z, radius, pnl.a, pnl.b) : distance_to_segment(z, pnl.a, pnl.b);
}

double panel_half_length(const Panel& pnl, double radius) {
  return pnl.arc ? radius * (pnl.b - pnl.a) / 2.0 : (pnl.b - pnl.a) / 2.0;
}

void refine(const Panel& pnl, double radius, const std::vector<cplx>& eigs, int depth, std::vector<Panel>& out) {
  bool ok = true;
  if (depth < kMaxSplitDepth) {
    const double half = panel_half_length(pnl, radius);
    for (const cplx& z : eigs) {
      if (panel_distance(pnl, radius, z) < kPanelSeparation * half) {
        ok = false;
        break;
      }
    }
  }
  if (ok) {
    out.push_back(pnl);
    return;
  }
  const double mid = 0.5 * (pnl.a + pnl.b);
  refine({pnl.arc, pnl.a, mid}, radius, eigs, depth + 1, out);
  refine({pnl.arc, mid, pnl.b}, radius, eigs, depth + 1, out);
}

std::vector<Panel> build_mesh(const Contour& c, const std::vector<cplx>& eigs) {
  const double seg_len = 2.0 * c.radius;
  const double arc_len = std::numbers::pi * c.radius;
  const int seg_nodes = std::max(1, static_cast<int>(std::lround(c.nodes * seg_len / (seg_len + arc_len))));
  const int arc_nodes = std::max(1, c.nodes - seg_nodes);
  const int seg_panels = std::max(1, (seg_nodes + kPanelOrder - 1) / kPanelOrder);
  const int arc_panels = std::max(1, (arc_nodes + kPanelOrder - 1) / kPanelOrder);
  std::vector<Panel> base;
  for (int k = 0; k < seg_panels; ++k) {
    base.push_back({false, -c.radius + seg_len * k / seg_panels, -c.radius + seg_len * (k + 1) / seg_panels});
  }
  for (int k = 0; k < arc_panels; ++k) {
    base.push_back({true, std::numbers::pi * k / arc_panels, std::numbers::pi * (k + 1) / arc_panels});
  }
  if (!c.graded) return base;
  std::vector<Panel> mesh;
  for (const auto& pnl : base) refine(pnl, c.radius, eigs, 0, mesh);
  return mesh;
}

std::vector<Panel> bisect_all(const std::vector<Panel>& mesh) {
  std::vector<Panel> out;
  out.reserve(2 * mesh.size());
  for (const auto& pnl : mesh) {
    const double mid = 0.5 * (pnl.a + pnl.b);
    out.push_back({pnl.arc, pnl.a, mid});
    out.push_back({pnl.arc, mid, pnl.b});
  }
  return out;
}

/// (lambda - T)^{-1} for upper triangular T, by column back-substitution.
CMatrix shifted_triangular_inverse(const CMatrix& t, cplx lambda) {
  const Eigen::Index n = t.rows();
  CMatrix x = CMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    x(j, j) = 1.0 / (lambda - t(j, j));
    for (Eigen::Index i = j - 1; i >= 0; --i) {
      // (lambda - T) is -T off the diagonal.
      const cplx acc = t.row(i).segment(i + 1, j - i).transpose().cwiseProduct(x.col(j).segment(i + 1, j - i)).sum();
      x(i, j) = acc / (lambda - t(i, i));
    }
  }
  return x;
}

struct Integration {
  CMatrix sum;              // in the Schur basis, times 1/(2 pi i)
  double min_sigma_est = std::numeric_limits<double>::infinity();
  int nodes = 0;
};

Integration integrate(const CMatrix& t, const Contour& c, const std::vector<Panel>& mesh) {
  const Rule& rule = panel_rule(c.rule);
  const Eigen::Index n = t.rows();
  std::vector<CMatrix> partial(mesh.size());
  std::vector<double> sigma(mesh.size(), std::numeric_limits<double>::infinity());
  parallel_for(mesh.size(), [&](std::size_t k) {
    const Panel& pnl = mesh[k];
    const double half = 0.5 * (pnl.b - pnl.a);
    const double mid = 0.5 * (pnl.a + pnl.b);
    CMatrix acc = CMatrix::Zero(n, n);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double s = mid + half * rule.nodes[q];
      cplx lambda, dlambda;
      if (pnl.arc) {
        lambda = std::polar(c.radius, s);
        dlambda = kI * lambda;
      } else {
        lambda = cplx(s, 0.0);
        dlambda = 1.0;
      }
      const CMatrix inv = shifted_triangular_inverse(t, lambda);
      sigma[k] = std::min(sigma[k], 1.0 / inv.norm());
      acc += (rule.weights[q] * half) * dlambda * inv;
    }
    partial[k] = std::move(acc);
  });
  Integration out;
  out.sum = CMatrix::Zero(n, n);
  for (std::size_t k = 0; k < mesh.size(); ++k) {
    out.sum += partial[k];
    out.min_sigma_est = std::min(out.min_sigma_est, sigma[k]);
  }
  out.sum /= 2.0 * std::numbers::pi * kI;
  out.nodes = static_cast<int>(mesh.size() * rule.nodes.size());
  return out;
}

void fill_defects(const CMatrix& a, ProjectorReport& r) {
  const CMatrix& q = r.q_plus;
  r.idempotency_defect = numerics::operator_norm(q * q - q);
  r.commutation_defect = numerics::operator_norm(a * q - q * a);
  r.trace = q.trace();
}

}  // namespace

void Contour::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius)) fail(ErrorKind::InvalidArgument, "contour radius must be positive");
  if (nodes < 16 || nodes % 2 != 0) fail(ErrorKind::InvalidArgument, "contour node count must be even and >= 16");
}

Contour auto_contour(const CMatrix& a, int nodes) {
  const CVector ev = numerics::eigenvalues(a);
  double rho = 0.0;
  for (Eigen::Index k = 0; k < ev.size(); ++k) rho = std::max(rho, std::abs(ev(k)));
  Contour c;
  c.radius = 2.0 * std::max(1.0, rho);
  c.nodes = nodes;
  return c;
}

ProjectorReport riesz_projector_quadrature(const CMatrix& a, const Contour& contour) {
  numerics::require_square(a, "projector argument");
  numerics::require_finite(a, "projector argument");
  contour.validate();

  Eigen::ComplexSchur<CMatrix> schur(a);
  if (schur.info() != Eigen::Success) fail(ErrorKind::NoConvergence, "Schur form for the contour integral");
  const CMatrix& t = schur.matrixT();
  const CMatrix& u = schur.matrixU();

  const double gap_min = contour.gap_min_rel * contour.radius;
  std::vector<cplx> eigs;
  ProjectorReport r;
  for (Eigen::Index k = 0; k < t.rows(); ++k) {
    const cplx z = t(k, k);
    eigs.push_back(z);
    const double d = std::min(distance_to_segment(z, -contour.radius, contour.radius),
                              distance_to_arc(z, contour.radius, 0.0, std::numbers::pi));
    if (d < gap_min) {
      fail(ErrorKind::ContourTooClose, "eigenvalue (" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) +
                                           ") lies within " + std::to_string(gap_min) + " of the contour");
    }
    if (z.imag() > 0.0) {
      if (std::abs(z) >= contour.radius) {
        fail(ErrorKind::InvalidArgument, "contour radius does not enclose the upper half-plane spectrum");
      }
      r.enclosed_eigenvalues.push_back(z);
    }
  }

  std::vector<Panel> mesh = build_mesh(contour, eigs);
  Integration coarse = integrate(t, contour, mesh);
  Integration result = coarse;
  if (contour.check_convergence) {
    Integration fine = integrate(t, contour, bisect_all(mesh));
    r.refinement_change = numerics::operator_norm(fine.sum - coarse.sum);
    if (r.refinement_change > contour.convergence_tol) {
      fail(ErrorKind::QuadratureNotConverged,
           "doubling the mesh changed Q+ by " + std::to_string(r.refinement_change));
    }
    result = std::move(fine);
  }
  if (result.min_sigma_est < gap_min) {
    fail(ErrorKind::ContourTooClose, "sigma_min(lambda - A) at a quadrature node fell below the gap threshold");
  }
  r.quadrature_nodes = result.nodes;
  r.q_plus = u * result.sum * u.adjoint();
  fill_defects(a, r);
  return r;
}

namespace {

// Givens rotation [c s; -conj(s) c] with [c s; -conj(s) c] [f; g] = [r; 0].
void givens(cplx f, cplx g, double& cs, cplx& sn) {
  if (g == cplx(0.0)) {
    cs = 1.0;
    sn = 0.0;
  } else if (f == cplx(0.0)) {
    cs = 0.0;
    sn = std::conj(g) / std::abs(g);
  } else {
    const double nrm = std::hypot(std::abs(f), std::abs(g));
    cs = std::abs(f) / nrm;
    sn = (f / std::abs(f)) * std::conj(g) / nrm;
  }
}

// Swaps the diagonal entries k and k+1 of the upper triangular t, updating u.
void swap_adjacent(CMatrix& t, CMatrix& u, Eigen::Index k) {
  const Eigen::Index n = t.rows();
  const cplx t11 = t(k, k), t22 = t(k + 1, k + 1);
  double cs;
  cplx sn;
  givens(t(k, k + 1), t22 - t11, cs, sn);
  for (Eigen::Index j = k + 2; j < n; ++j) {
    const cplx x = t(k, j), y = t(k + 1, j);
    t(k, j) = cs * x + sn * y;
    t(k + 1, j) = cs * y - std::conj(sn) * x;
  }
  const cplx snc = std::conj(sn);
  for (Eigen::Index i = 0; i < k; ++i) {
    const cplx x = t(i, k), y = t(i, k + 1);
    t(i, k) = cs * x + snc * y;
    t(i, k + 1) = cs * y - sn * x;
  }
  t(k, k) = t22;
  t(k + 1, k + 1) = t11;
  for (Eigen::Index i = 0; i < n; ++i) {
    const cplx x = u(i, k), y = u(i, k + 1);
    u(i, k) = cs * x + snc * y;
    u(i, k + 1) = cs * y - sn * x;
  }
}

}  // namespace

ProjectorReport riesz_projector_exact(const CMatrix& a, const HalfPlaneRegion& region) {
  numerics::require_square(a, "projector argument");
  numerics::require_finite(a, "projector argument");
  const Eigen::Index n = a.rows();
  const bool open = std::holds_alternative<UpperOpen>(region);
  const double tol = open ? std::get<UpperOpen>(region).tol : std::get<UpperClosed>(region).tol;
  auto selected = [&](cplx z) { return open ? z.imag() > 0.0 : z.imag() >= -tol; };

  Eigen::ComplexSchur<CMatrix> schur(a);
  if (schur.info() != Eigen::Success) fail(ErrorKind::NoConvergence, "Schur form for the exact projector");
  CMatrix t = schur.matrixT();
  CMatrix u = schur.matrixU();

  ProjectorReport r;
  for (Eigen::Index k = 0; k < n; ++k) {
    const cplx z = t(k, k);
    if (open && std::abs(z.imag()) < tol) {
      fail(ErrorKind::BoundaryEigenvalue, "eigenvalue with |Im| below " + std::to_string(tol));
    }
    if (selected(z)) r.enclosed_eigenvalues.push_back(z);
  }

  // Reorder the Schur form so the selected eigenvalues lead.
  Eigen::Index lead = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!selected(t(k, k))) continue;
    for (Eigen::Index j = k; j > lead; --j) swap_adjacent(t, u, j - 1);
    ++lead;
  }

  if (lead == 0) {
    r.q_plus = CMatrix::Zero(n, n);
  } else if (lead == n) {
    r.q_plus = CMatrix::Identity(n, n);
  } else {
    // Q = U [[I, Y], [0, 0]] U* with T11 Y - Y T22 = T12.
    const Eigen::Index rest = n - lead;
    const CMatrix y = numerics::solve_sylvester(t.topLeftCorner(lead, lead), t.bottomRightCorner(rest, rest),
                                                t.topRightCorner(lead, rest));
    CMatrix block = CMatrix::Zero(n, n);
    block.topLeftCorner(lead, lead).setIdentity();
    block.topRightCorner(lead, rest) = y;
    r.q_plus = u * block * u.adjoint();
  }
  fill_defects(a, r);
  return r;
}

Subspace invariant_subspace_from_projector(const CMatrix& a, const ProjectorReport& q, const KreinStructure& s) {
  if (a.rows() != s.dim() || q.q_plus.rows() != s.dim()) fail(ErrorKind::DimensionMismatch, "projector size");
  const double tr = q.trace.real();
  const long rank = std::lround(tr);
  if (std::abs(tr - static_cast<double>(rank)) > 1e-6 || std::abs(q.trace.imag()) > 1e-6 || rank < 0 ||
      rank > s.dim()) {
    fail(ErrorKind::RankAmbiguous, "trace(Q+) = " + std::to_string(tr) + " is not an admissible integer");
  }
  if (rank == 0) return Subspace::empty(s);
  Eigen::JacobiSVD<CMatrix> svd(q.q_plus, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double top = sv(0);
  const bool lower_ok = sv(rank - 1) > 1e-8 * top;
  const bool upper_ok = rank == s.dim() || sv(rank) <= 1e-6 * sv(rank - 1);
  if (!lower_ok || !upper_ok) {
    fail(ErrorKind::RankAmbiguous, "singular values of Q+ show no gap at rank " + std::to_string(rank));
  }
  return Subspace(s, svd.matrixU().leftCols(rank));
}

double invariance_residual(const CMatrix& a, const Subspace& l) {
  if (l.dim() == 0) return 0.0;
  const CMatrix& b = l.basis();
  const CMatrix ab = a * b;
  return numerics::operator_norm(ab - b * (b.adjoint() * ab));
}

bool region_contains(const Region& omega, cplx z) {
  if (const auto* r = std::get_if<Rectangle>(&omega)) {
    return z.real() >= r->re_min && z.real() <= r->re_max && z.imag() >= r->im_min && z.imag() <= r->im_max;
  }
  const auto& d = std::get<Disk>(omega);
  return std::abs(z - d.center) < d.radius;
}

double region_distance(const Region& omega, cplx z) {
  if (region_contains(omega, z)) return 0.0;
  if (const auto* r = std::get_if<Rectangle>(&omega)) {
    const double dx = std::max({r->re_min - z.real(), 0.0, z.real() - r->re_max});
    const double dy = std::max({r->im_min - z.imag(), 0.0, z.imag() - r->im_max});
    return std::hypot(dx, dy);
  }
  const auto& d = std::get<Disk>(omega);
  return std::abs(z - d.center) - d.radius;
}

StabilityReport spectral_stability_check(const std::vector<CMatrix>& sequence, const CMatrix& limit,
                                         const Region& omega) {
  if (sequence.empty()) fail(ErrorKind::InvalidArgument, "stability check needs a non-empty sequence");
  StabilityReport r;
  r.distances_decreasing = true;
  for (std::size_t n = 0; n < sequence.size(); ++n) {
    if (sequence[n].rows() != limit.rows() || sequence[n].cols() != limit.cols()) {
      fail(ErrorKind::DimensionMismatch, "sequence and limit sizes differ");
    }
    r.sequence_distances.push_back(numerics::operator_norm(sequence[n] - limit));
    if (n > 0 && r.sequence_distances[n] > r.sequence_distances[n - 1]) r.distances_decreasing = false;
    const CVector ev = numerics::eigenvalues(sequence[n]);
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
      if (region_contains(omega, ev(k))) {
        fail(ErrorKind::HypothesisViolated, "member " + std::to_string(n) + " of the sequence has an eigenvalue in the region");
      }
      gap = std::min(gap, region_distance(omega, ev(k)));
    }
    r.sequence_min_gap.push_back(gap);
  }
  const CVector ev = numerics::eigenvalues(limit);
  r.limit_min_gap = std::numeric_limits<double>::infinity();
  r.limit_spectrum_avoids_region = true;
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (region_contains(omega, ev(k))) r.limit_spectrum_avoids_region = false;
    r.limit_min_gap = std::min(r.limit_min_gap, region_distance(omega, ev(k)));
  }
  return r;
}

}  // namespace krein
