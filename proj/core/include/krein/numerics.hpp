#pragma once

// Dense complex linear algebra kernel shared by every other module.
// All functions are pure; matrices are Eigen::MatrixXcd values.

#include <complex>

#include <Eigen/Dense>

#include "krein/errors.hpp"

namespace krein {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

namespace numerics {

/// Default relative singularity threshold: sigma_min(M - mu) < kSingularRel * ||M - mu||.
inline constexpr double kSingularRel = 1e-12;

/// Throws NonFinite when any entry is NaN or Inf.
void require_finite(const CMatrix& m, const char* what);
void require_square(const CMatrix& m, const char* what);

/// Largest singular value.
double operator_norm(const CMatrix& m);

/// Smallest singular value.
double sigma_min(const CMatrix& m);

/// Solves (M - mu I) X = B. Raises SingularShift when M - mu I is numerically
/// singular relative to its norm.
CMatrix solve_shifted(const CMatrix& m, cplx mu, const CMatrix& b, double singular_rel = kSingularRel);

struct Eigendecomposition {
  CVector values;
  CMatrix vectors;  // unit columns, vectors.col(k) pairs with values(k)
};

/// Eigenpairs with multiplicity. Raises NoConvergence if the QR iteration stalls.
Eigendecomposition eigendecomposition(const CMatrix& m);

/// Eigenvalues only (cheaper).
CVector eigenvalues(const CMatrix& m);

/// Hermitian part of the imaginary direction, (M - M*)/(2i).
CMatrix imaginary_part(const CMatrix& m);

/// Ascending eigenvalues of a Hermitian matrix.
RVector hermitian_eigenvalues(const CMatrix& h);
double hermitian_min_eigenvalue(const CMatrix& h);

/// Orthonormal basis of the column space, rank decided by sigma_k > rel_tol * sigma_1.
CMatrix orthonormal_columns(const CMatrix& m, double rel_tol = 1e-12);

/// Orthonormal basis of the orthogonal complement of range(m) inside C^rows.
CMatrix orthogonal_complement(const CMatrix& m, double rel_tol = 1e-12);

/// Solves A X - X B = C by Bartels-Stewart over complex Schur forms.
CMatrix solve_sylvester(const CMatrix& a, const CMatrix& b, const CMatrix& c);

/// Orthogonal projector onto range(basis) for a basis with orthonormal columns.
CMatrix orthoprojector(const CMatrix& basis);

/// Largest principal-angle sine between the column spaces of u and v.
double subspace_distance(const CMatrix& u, const CMatrix& v);

}  // namespace numerics
}  // namespace krein
