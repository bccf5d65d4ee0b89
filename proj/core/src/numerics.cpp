#include "krein/numerics.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "krein/errors.hpp"

namespace krein::numerics {

void require_finite(const CMatrix& m, const char* what) {
  if (!m.allFinite()) fail(ErrorKind::NonFinite, std::string(what) + " contains NaN or Inf");
}

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    fail(ErrorKind::DimensionMismatch, std::string(what) + " must be square, got " +
                                           std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

double operator_norm(const CMatrix& m) {
  require_finite(m, "operator_norm argument");
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

double sigma_min(const CMatrix& m) {
  require_finite(m, "sigma_min argument");
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  return s(s.size() - 1);
}

CMatrix solve_shifted(const CMatrix& m, cplx mu, const CMatrix& b, double singular_rel) {
  require_square(m, "solve_shifted matrix");
  if (b.rows() != m.rows()) fail(ErrorKind::DimensionMismatch, "solve_shifted right-hand side rows");
  require_finite(m, "solve_shifted matrix");
  require_finite(b, "solve_shifted right-hand side");
  if (!std::isfinite(mu.real()) || !std::isfinite(mu.imag())) fail(ErrorKind::NonFinite, "solve_shifted shift");

  CMatrix shifted = m;
  shifted.diagonal().array() -= mu;
  Eigen::PartialPivLU<CMatrix> lu(shifted);
  // rcond is a cheap estimate; confirm with an SVD before declaring singularity.
  // The rcond estimate can miss exactly zero pivots, so the pivot ratio is screened too.
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double pivot_ratio = pivots.maxCoeff() > 0.0 ? pivots.minCoeff() / pivots.maxCoeff() : 0.0;
  if (!(lu.rcond() >= 1e3 * singular_rel) || !(pivot_ratio >= 1e3 * singular_rel)) {
    Eigen::JacobiSVD<CMatrix> svd(shifted);
    const auto& s = svd.singularValues();
    if (s(0) == 0.0 || s(s.size() - 1) < singular_rel * s(0)) {
      fail(ErrorKind::SingularShift, "M - mu I is numerically singular (sigma_min/sigma_max = " +
                                         std::to_string(s(0) == 0.0 ? 0.0 : s(s.size() - 1) / s(0)) + ")");
    }
  }
  CMatrix x = lu.solve(b);
  // One step of iterative refinement keeps the residual at roundoff level.
  CMatrix r = b - shifted * x;
  x += lu.solve(r);
  return x;
}

Eigendecomposition eigendecomposition(const CMatrix& m) {
  require_square(m, "eigendecomposition argument");
  require_finite(m, "eigendecomposition argument");
  Eigen::ComplexEigenSolver<CMatrix> solver(m, true);
  if (solver.info() != Eigen::Success) fail(ErrorKind::NoConvergence, "complex QR iteration exceeded its cap");
  Eigendecomposition out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index k = 0; k < out.vectors.cols(); ++k) {
    const double nrm = out.vectors.col(k).norm();
    if (nrm > 0.0) out.vectors.col(k) /= nrm;
  }
  return out;
}

CVector eigenvalues(const CMatrix& m) {
  require_square(m, "eigenvalues argument");
  require_finite(m, "eigenvalues argument");
  if (m.rows() == 0) return CVector{};
  Eigen::ComplexSchur<CMatrix> schur(m, false);
  if (schur.info() != Eigen::Success) fail(ErrorKind::NoConvergence, "complex Schur iteration exceeded its cap");
  return schur.matrixT().diagonal();
}

CMatrix imaginary_part(const CMatrix& m) { return (m - m.adjoint()) / (2.0 * kI); }

RVector hermitian_eigenvalues(const CMatrix& h) {
  require_square(h, "hermitian_eigenvalues argument");
  require_finite(h, "hermitian_eigenvalues argument");
  const CMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) fail(ErrorKind::NoConvergence, "Hermitian eigensolver failed");
  return solver.eigenvalues();
}

double hermitian_min_eigenvalue(const CMatrix& h) {
  if (h.rows() == 0) return 0.0;
  return hermitian_eigenvalues(h)(0);
}

CMatrix orthonormal_columns(const CMatrix& m, double rel_tol) {
  require_finite(m, "orthonormal_columns argument");
  if (m.cols() == 0 || m.rows() == 0) return CMatrix(m.rows(), 0);
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > rel_tol * s(0) && s(rank) > 0.0) ++rank;
  return svd.matrixU().leftCols(rank);
}

CMatrix orthogonal_complement(const CMatrix& m, double rel_tol) {
  const Eigen::Index n = m.rows();
  if (m.cols() == 0) return CMatrix::Identity(n, n);
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > rel_tol * s(0) && s(rank) > 0.0) ++rank;
  return svd.matrixU().rightCols(n - rank);
}

CMatrix solve_sylvester(const CMatrix& a, const CMatrix& b, const CMatrix& c) {
  require_square(a, "sylvester A");
  require_square(b, "sylvester B");
  if (c.rows() != a.rows() || c.cols() != b.rows()) fail(ErrorKind::DimensionMismatch, "sylvester right-hand side");
  Eigen::ComplexSchur<CMatrix> sa(a), sb(b);
  if (sa.info() != Eigen::Success || sb.info() != Eigen::Success) {
    fail(ErrorKind::NoConvergence, "Schur form for Sylvester solve");
  }
  const CMatrix& ta = sa.matrixT();
  const CMatrix& tb = sb.matrixT();
  const CMatrix& ua = sa.matrixU();
  const CMatrix& ub = sb.matrixU();
  // Ta Y - Y Tb = Ua* C Ub, column by column (Tb upper triangular).
  const CMatrix f = ua.adjoint() * c * ub;
  const Eigen::Index n = tb.rows();
  CMatrix y(a.rows(), n);
  const double scale = std::max(1.0, std::max(ta.cwiseAbs().maxCoeff(), tb.cwiseAbs().maxCoeff()));
  for (Eigen::Index k = 0; k < n; ++k) {
    CVector rhs = f.col(k);
    if (k > 0) rhs += y.leftCols(k) * tb.col(k).head(k);
    CMatrix shifted = ta;
    shifted.diagonal().array() -= tb(k, k);
    for (Eigen::Index i = 0; i < shifted.rows(); ++i) {
      if (std::abs(shifted(i, i)) < 1e-14 * scale) {
        fail(ErrorKind::SingularShift, "Sylvester operator is singular (shared eigenvalue)");
      }
    }
    y.col(k) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  return ua * y * ub.adjoint();
}

CMatrix orthoprojector(const CMatrix& basis) { return basis * basis.adjoint(); }

double subspace_distance(const CMatrix& u, const CMatrix& v) {
  if (u.cols() != v.cols()) return 1.0;
  if (u.cols() == 0) return 0.0;
  const CMatrix qu = orthonormal_columns(u);
  const CMatrix qv = orthonormal_columns(v);
  if (qu.cols() != qv.cols()) return 1.0;
  // ||(I - P_v) P_u|| equals the sine of the largest principal angle.
  const CMatrix residual = qu - qv * (qv.adjoint() * qu);
  return operator_norm(residual);
}

}  // namespace krein::numerics
