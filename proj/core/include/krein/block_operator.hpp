#pragma once

// The 2x2 operator matrix of A with respect to H+ (+) H-, its Schur-complement
// transfer data and the quantitative diagnostics built on them.

#include <limits>
#include <optional>
#include <vector>

#include "krein/krein_space.hpp"

namespace krein {

class BlockOperator {
 public:
  BlockOperator(CMatrix a11, CMatrix a12, CMatrix a21, CMatrix a22);

  static BlockOperator decompose(const CMatrix& a, const KreinStructure& s);

  const KreinStructure& structure() const noexcept { return structure_; }
  const CMatrix& a11() const noexcept { return a11_; }
  const CMatrix& a12() const noexcept { return a12_; }
  const CMatrix& a21() const noexcept { return a21_; }
  const CMatrix& a22() const noexcept { return a22_; }

  CMatrix assemble() const;
  double norm() const { return numerics::operator_norm(assemble()); }

 private:
  KreinStructure structure_;
  CMatrix a11_, a12_, a21_, a22_;
};

inline BlockOperator assemble(CMatrix a11, CMatrix a12, CMatrix a21, CMatrix a22) {
  return BlockOperator(std::move(a11), std::move(a12), std::move(a21), std::move(a22));
}

/// lambda_min of (JA - (JA)*)/(2i). Positive means uniformly dissipative with that epsilon.
double dissipativity_margin(const BlockOperator& a);

/// S(mu) = A11 - A12 F, F = (A22 - mu)^{-1} A21, G = A12 (A22 - mu)^{-1}.
struct SchurData {
  cplx mu;
  CMatrix s;
  CMatrix f;
  CMatrix g;
};

/// Requires Im mu > 0 unless allow_closed_half_plane is set (then Im mu >= 0).
SchurData schur_data(const BlockOperator& a, cplx mu, bool allow_closed_half_plane = false);

/// G(mu) alone; valid anywhere off sigma(A22).
CMatrix transfer_g(const BlockOperator& a, cplx mu);
CMatrix transfer_f(const BlockOperator& a, cplx mu);
CMatrix transfer_s(const BlockOperator& a, cplx mu);

/// ||A - (mu + U D V)|| / ||A|| for the three-factor closure representation.
double factorization_residual(const BlockOperator& a, cplx mu);

/// Default shift i(1 + ||A22||).
cplx default_mu(const BlockOperator& a);

struct ConditionsConfig {
  double tol = 1e-10;
  double f_cap = std::numeric_limits<double>::infinity();
  double s_cap = std::numeric_limits<double>::infinity();
  /// sigma_k(G)/sigma_1(G) above this counts toward the effective rank.
  double g_decay_threshold = 1e-8;
  /// Largest effective rank accepted for condition (iii); default is no limit.
  Eigen::Index g_max_effective_rank = std::numeric_limits<Eigen::Index>::max();
};

struct ConditionItem {
  double value = 0.0;
  bool pass = false;
};

struct ConditionsReport {
  cplx mu;
  ConditionItem condition_i;   // lambda_min(Im(-A22))
  ConditionItem condition_ii;  // ||F(mu)||
  ConditionItem condition_iii; // ||G(mu)||, pass against the effective-rank cap
  std::vector<double> g_singular_profile;  // sigma_k(G)/sigma_1(G)
  Eigen::Index g_effective_rank = 0;
  ConditionItem condition_iv;  // ||S(mu)||
  bool all_pass() const { return condition_i.pass && condition_ii.pass && condition_iii.pass && condition_iv.pass; }
};

/// lambda_min of Im(-A22) = (-A22 + A22*)/(2i); condition (i) holds when >= -tol.
double condition_i_margin(const BlockOperator& a);

ConditionsReport check_theorem_conditions(const BlockOperator& a, cplx mu, const ConditionsConfig& cfg = {});

struct DecayConfig {
  cplx mu0{0.0, 0.0};
  double horizon = std::numeric_limits<double>::infinity();
  double tol = 1e-2;
};

struct DecayPoint {
  double height;
  double g_norm;
};

struct DecayProfile {
  std::vector<DecayPoint> points;
  bool envelope_ok = false;  // last <= first
  bool horizon_ok = false;   // last <= tol whenever the last height exceeds the horizon
};

/// ||G(mu0 + i h)|| over increasing heights h > 0. The profile must decay toward zero.
DecayProfile g_decay_profile(const BlockOperator& a, const std::vector<double>& heights, const DecayConfig& cfg = {});

struct GBoundReport {
  double a = 0.0;        // 2 ||A P+|| (1 + 1e-6)
  double eps = 0.0;
  double bound = 0.0;    // 2 + 2a/eps
  double max_g_norm = 0.0;
  double max_ratio = 0.0;  // max ||G(lambda)|| / bound
  bool holds = false;
};

/// Checks ||G(lambda)|| <= 2 + 2a/eps at every sample in the closed upper half-plane.
GBoundReport g_uniform_bound_check(const BlockOperator& a, double eps, const std::vector<cplx>& samples);

struct AsymptoticsRadius {
  double radius;
  double fitted_c;  // max over the semicircle of ||(S(l)-l)^{-1} + 1/l|| |l|^2
};

struct AsymptoticsReport {
  std::vector<AsymptoticsRadius> radii;
  double c_ratio = 0.0;       // C(largest) / C(second largest)
  bool c_stable = false;      // ratio within [1/4, 4]
  double max_identity_defect = 0.0;  // top-left resolvent block vs (l - S(l))^{-1}
  bool identity_ok = false;
};

struct AsymptoticsConfig {
  int samples_per_radius = 16;
  int probe_vectors = 4;
  double identity_tol = 1e-8;
  unsigned long long seed = 1;
};

AsymptoticsReport resolvent_asymptotics_check(const BlockOperator& a, const std::vector<double>& radii,
                                              const AsymptoticsConfig& cfg = {});

/// Relative residual of G(l) = G(mu) + (l - mu) G(mu) (A22 - l)^{-1}.
double g_resolvent_identity_residual(const BlockOperator& a, cplx lambda, cplx mu);

/// Relative residuals of the eps-shift identities for G and S.
struct ShiftIdentityResiduals {
  double g_shift;
  double s_shift;          // S(mu + i eps) = S(mu) - i eps G(mu + i eps) F(mu)
  double s_shift_printed;  // same identity with the opposite sign on the correction term
};
ShiftIdentityResiduals shift_identity_residuals(const BlockOperator& a, cplx mu, double eps);

}  // namespace krein
