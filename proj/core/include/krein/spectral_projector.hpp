#pragma once

// Riesz projectors onto the spectral subspace of the upper half-plane.

#include <optional>
#include <variant>
#include <vector>

#include "krein/krein_space.hpp"

namespace krein {

enum class QuadratureRule { trapezoid, gauss_segments };

/// Closed, positively oriented contour: segment [-R, R] followed by the upper
/// half circle of radius R.
struct Contour {
  double radius = 0.0;
  int nodes = 256;  // base node budget, split between arc and segment by length
  QuadratureRule rule = QuadratureRule::gauss_segments;
  double gap_min_rel = 1e-6;        // eigenvalues closer than gap_min_rel * R to the contour are refused
  double convergence_tol = 1e-8;    // max change of Q+ when the mesh is doubled
  bool check_convergence = true;
  bool graded = true;               // split segment panels that sit too close to an eigenvalue

  void validate() const;
};

/// R = 2 max(1, max |lambda|) using eigenvalue estimates of A.
Contour auto_contour(const CMatrix& a, int nodes = 256);

struct ProjectorReport {
  CMatrix q_plus;
  double idempotency_defect = 0.0;   // ||Q^2 - Q||
  double commutation_defect = 0.0;   // ||A Q - Q A||
  std::vector<cplx> enclosed_eigenvalues;
  cplx trace{0.0, 0.0};
  int quadrature_nodes = 0;          // 0 for the exact route
  double refinement_change = 0.0;    // ||Q_2N - Q_N|| when convergence is checked
};

ProjectorReport riesz_projector_quadrature(const CMatrix& a, const Contour& contour);

struct UpperOpen {
  double tol = 1e-10;
};
struct UpperClosed {
  double tol = 1e-10;
};
using HalfPlaneRegion = std::variant<UpperOpen, UpperClosed>;

/// Spectral projector onto the generalized eigenspaces with Im lambda > 0
/// (or >= -tol), from a reordered Schur form and one Sylvester solve.
ProjectorReport riesz_projector_exact(const CMatrix& a, const HalfPlaneRegion& region = UpperOpen{});

/// Orthonormal basis of range(Q+); rank taken from trace(Q+).
Subspace invariant_subspace_from_projector(const CMatrix& a, const ProjectorReport& q, const KreinStructure& s);

/// ||(I - P_L) A P_L|| for the orthoprojector P_L of L.
double invariance_residual(const CMatrix& a, const Subspace& l);

struct Rectangle {
  double re_min, re_max, im_min, im_max;
};
struct Disk {
  cplx center;
  double radius;
};
using Region = std::variant<Rectangle, Disk>;

bool region_contains(const Region& omega, cplx z);
/// 0 inside, Euclidean distance to the region otherwise.
double region_distance(const Region& omega, cplx z);

struct StabilityReport {
  std::vector<double> sequence_distances;   // ||T_n - T||
  bool distances_decreasing = false;
  std::vector<double> sequence_min_gap;     // min distance from sigma(T_n) to Omega
  double limit_min_gap = 0.0;
  bool limit_spectrum_avoids_region = false;
};

/// If each sigma(T_n) misses Omega and T_n -> T, then sigma(T) misses Omega.
/// Raises HypothesisViolated when some T_n has an eigenvalue inside Omega.
StabilityReport spectral_stability_check(const std::vector<CMatrix>& sequence, const CMatrix& limit,
                                         const Region& omega);

}  // namespace krein
