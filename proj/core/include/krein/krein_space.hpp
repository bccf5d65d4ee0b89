#pragma once

// Indefinite-metric geometry of C^{p+m} = H+ (+) H- with J = diag(I_p, -I_m).

#include <optional>
#include <variant>

#include "krein/numerics.hpp"

namespace krein {

/// Dimensions of the positive and negative parts; J is diag(I_p, -I_m).
class KreinStructure {
 public:
  KreinStructure(Eigen::Index p, Eigen::Index m);

  Eigen::Index p() const noexcept { return p_; }
  Eigen::Index m() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return p_ + m_; }

  CMatrix signature() const;        // J
  CMatrix positive_projector() const;  // P+
  CMatrix negative_projector() const;  // P-

  /// Multiplies by J without materializing it.
  CMatrix apply_signature(const CMatrix& x) const;

  friend bool operator==(const KreinStructure&, const KreinStructure&) = default;

 private:
  Eigen::Index p_;
  Eigen::Index m_;
};

/// [x, y] = (Jx, y) = y* J x, conjugate-linear in the second slot.
cplx indefinite_inner_product(const KreinStructure& s, const CVector& x, const CVector& y);

/// A subspace of C^{p+m} carried by an orthonormal basis (k columns).
class Subspace {
 public:
  /// Validates orthonormality (within 1e-10). k = 0 is allowed only through empty().
  Subspace(KreinStructure structure, CMatrix basis);

  /// Orthonormalizes arbitrary spanning columns first.
  static Subspace from_spanning_set(KreinStructure structure, const CMatrix& columns);
  static Subspace empty(KreinStructure structure);

  const KreinStructure& structure() const noexcept { return structure_; }
  const CMatrix& basis() const noexcept { return basis_; }
  Eigen::Index dim() const noexcept { return basis_.cols(); }

  /// B* J B.
  CMatrix gram() const;

 private:
  Subspace(KreinStructure structure, CMatrix basis, bool);
  KreinStructure structure_;
  CMatrix basis_;
};

struct NegativeTouching {
  double lambda_min;
};
struct Nonnegative {
  double lambda_min;
};
struct UniformlyPositive {
  double delta;
};
struct Indefinite {
  double lambda_min;
  double lambda_max;
};
using Classification = std::variant<NegativeTouching, Nonnegative, UniformlyPositive, Indefinite>;

/// Default tolerance 1e-9 * (1 + ||B||^2).
double default_classification_tol(const Subspace& l);

/// Classifies through lambda_min / lambda_max of the J-Gram matrix B* J B.
Classification classify_subspace(const Subspace& l, std::optional<double> tol = std::nullopt);
Classification classify_subspace(const Subspace& l, double tol);

bool is_nonnegative(const Classification& c);

/// The m x p angle operator K whose graph {(x+, K x+)} is a maximal nonnegative subspace.
class AngleOperator {
 public:
  AngleOperator(KreinStructure structure, CMatrix k);

  const KreinStructure& structure() const noexcept { return structure_; }
  const CMatrix& matrix() const noexcept { return k_; }
  double norm() const { return numerics::operator_norm(k_); }

 private:
  KreinStructure structure_;
  CMatrix k_;
};

inline constexpr double kAngleNormSlack = 1e-8;

/// K = P- Q^{-1} with Q = P+|_L. Requires dim L = p and P+(L) = H+.
AngleOperator angle_operator_from_subspace(const Subspace& l, std::optional<double> tol = std::nullopt);

/// Orthonormalized column space of [I_p; K].
Subspace subspace_from_angle_operator(const AngleOperator& k);

/// A unit y+ in H+ orthogonal to L when P+(L) != H+, otherwise nothing.
std::optional<CVector> maximality_witness(const Subspace& l, double rel_tol = 1e-10);

}  // namespace krein
