#include "krein/krein_space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "krein/errors.hpp"

namespace krein {

KreinStructure::KreinStructure(Eigen::Index p, Eigen::Index m) : p_(p), m_(m) {
  if (p < 1 || m < 1) {
    fail(ErrorKind::InvalidArgument,
         "Krein structure needs p >= 1 and m >= 1, got p=" + std::to_string(p) + " m=" + std::to_string(m));
  }
}

CMatrix KreinStructure::signature() const {
  CMatrix j = CMatrix::Zero(dim(), dim());
  j.diagonal().head(p_).setOnes();
  j.diagonal().tail(m_).setConstant(-1.0);
  return j;
}

CMatrix KreinStructure::positive_projector() const {
  CMatrix pp = CMatrix::Zero(dim(), dim());
  pp.diagonal().head(p_).setOnes();
  return pp;
}

CMatrix KreinStructure::negative_projector() const {
  CMatrix pm = CMatrix::Zero(dim(), dim());
  pm.diagonal().tail(m_).setOnes();
  return pm;
}

CMatrix KreinStructure::apply_signature(const CMatrix& x) const {
  if (x.rows() != dim()) fail(ErrorKind::DimensionMismatch, "apply_signature rows");
  CMatrix y = x;
  y.bottomRows(m_) *= -1.0;
  return y;
}

cplx indefinite_inner_product(const KreinStructure& s, const CVector& x, const CVector& y) {
  if (x.size() != s.dim() || y.size() != s.dim()) {
    fail(ErrorKind::DimensionMismatch, "inner product vectors must have length p+m");
  }
  return y.head(s.p()).dot(x.head(s.p())) - y.tail(s.m()).dot(x.tail(s.m()));
}

Subspace::Subspace(KreinStructure structure, CMatrix basis, bool)
    : structure_(structure), basis_(std::move(basis)) {}

Subspace::Subspace(KreinStructure structure, CMatrix basis) : structure_(structure), basis_(std::move(basis)) {
  numerics::require_finite(basis_, "subspace basis");
  if (basis_.rows() != structure_.dim()) fail(ErrorKind::DimensionMismatch, "subspace basis rows must equal p+m");
  if (basis_.cols() < 1 || basis_.cols() > structure_.dim()) {
    fail(ErrorKind::InvalidArgument, "subspace dimension must be in [1, p+m]");
  }
  const CMatrix defect = basis_.adjoint() * basis_ - CMatrix::Identity(basis_.cols(), basis_.cols());
  if (defect.cwiseAbs().maxCoeff() > 1e-10) fail(ErrorKind::InvalidArgument, "subspace basis is not orthonormal");
}

Subspace Subspace::from_spanning_set(KreinStructure structure, const CMatrix& columns) {
  if (columns.rows() != structure.dim()) fail(ErrorKind::DimensionMismatch, "spanning set rows must equal p+m");
  CMatrix q = numerics::orthonormal_columns(columns);
  if (q.cols() == 0) return empty(structure);
  return Subspace(structure, std::move(q));
}

Subspace Subspace::empty(KreinStructure structure) {
  return Subspace(structure, CMatrix(structure.dim(), 0), true);
}

CMatrix Subspace::gram() const { return basis_.adjoint() * structure_.apply_signature(basis_); }

double default_classification_tol(const Subspace& l) {
  const double b = l.dim() == 0 ? 0.0 : numerics::operator_norm(l.basis());
  return 1e-9 * (1.0 + b * b);
}

Classification classify_subspace(const Subspace& l, std::optional<double> tol) {
  return classify_subspace(l, tol.value_or(default_classification_tol(l)));
}

Classification classify_subspace(const Subspace& l, double tol) {
  if (l.dim() == 0) return Nonnegative{0.0};
  const RVector ev = numerics::hermitian_eigenvalues(l.gram());
  const double lo = ev(0);
  const double hi = ev(ev.size() - 1);
  if (lo > tol) return UniformlyPositive{lo};
  if (lo >= -tol) return Nonnegative{lo};
  if (hi > tol) return Indefinite{lo, hi};
  return NegativeTouching{lo};
}

bool is_nonnegative(const Classification& c) {
  return std::holds_alternative<Nonnegative>(c) || std::holds_alternative<UniformlyPositive>(c);
}

AngleOperator::AngleOperator(KreinStructure structure, CMatrix k) : structure_(structure), k_(std::move(k)) {
  numerics::require_finite(k_, "angle operator");
  if (k_.rows() != structure_.m() || k_.cols() != structure_.p()) {
    fail(ErrorKind::DimensionMismatch, "angle operator must be m x p");
  }
}

AngleOperator angle_operator_from_subspace(const Subspace& l, std::optional<double> tol) {
  const auto& s = l.structure();
  if (!is_nonnegative(classify_subspace(l, tol))) {
    fail(ErrorKind::NotNonnegative, "subspace is not nonnegative in the indefinite metric");
  }
  const CMatrix top = l.basis().topRows(s.p());
  const CMatrix bottom = l.basis().bottomRows(s.m());
  Eigen::JacobiSVD<CMatrix> svd(top);
  const auto& sv = svd.singularValues();
  // P+ restricted to L must be onto H+ (and then injective since dim L = p).
  if (l.dim() != s.p() || sv.size() < s.p() || sv(s.p() - 1) <= 1e-10 * std::max(1.0, sv(0))) {
    fail(ErrorKind::NotMaximal, "P+(L) != H+; the subspace is not maximal");
  }
  // K top = bottom, i.e. K = bottom * top^{-1}.
  const CMatrix k = top.transpose().partialPivLu().solve(bottom.transpose()).transpose();
  return AngleOperator(s, k);
}

Subspace subspace_from_angle_operator(const AngleOperator& k) {
  const auto& s = k.structure();
  const double nrm = k.norm();
  if (nrm > 1.0 + kAngleNormSlack) {
    fail(ErrorKind::NormExceeded, "angle operator norm " + std::to_string(nrm) + " exceeds 1");
  }
  CMatrix stacked(s.dim(), s.p());
  stacked.topRows(s.p()).setIdentity();
  stacked.bottomRows(s.m()) = k.matrix();
  // [I; K] has full column rank, so its thin QR factor is an orthonormal basis.
  Eigen::HouseholderQR<CMatrix> qr(stacked);
  CMatrix q = qr.householderQ() * CMatrix::Identity(s.dim(), s.p());
  return Subspace(s, std::move(q));
}

std::optional<CVector> maximality_witness(const Subspace& l, double rel_tol) {
  const auto& s = l.structure();
  if (l.dim() == 0) {
    CVector e = CVector::Zero(s.dim());
    e(0) = 1.0;
    return e;
  }
  // y+ in H+ with (x, y+) = 0 for all x in L  <=>  y+ orthogonal to P+(L).
  const CMatrix top = l.basis().topRows(s.p());
  const CMatrix comp = numerics::orthogonal_complement(top, rel_tol);
  if (comp.cols() == 0) return std::nullopt;
  CVector y = CVector::Zero(s.dim());
  y.head(s.p()) = comp.col(0);
  return y;
}

}  // namespace krein
