#pragma once

// Maximal nonnegative invariant subspaces of J-dissipative operators through
// eps-regularization A + i eps J, Galerkin truncation of H+, Riesz projectors
// and the angle-operator Riccati equation.

#include <limits>
#include <optional>
#include <vector>

#include "krein/block_operator.hpp"
#include "krein/errors.hpp"
#include "krein/spectral_projector.hpp"

namespace krein {

struct SolverTolerances {
  double riccati_tol = 1e-9;      // relative to ||S|| + |mu|
  double invariance_tol = 1e-7;   // relative to ||A||
  double norm_slack = 1e-8;       // ||K|| <= 1 + norm_slack
  double spec_slack = 1e-6;       // min Im of the restriction spectrum >= -spec_slack
  double cauchy_tol = 5e-2;       // estimated distance from K(eps_last) to the limit
  int cauchy_window = 3;
  double dissipativity_tol = 1e-10;
};

struct SolverConfig {
  std::optional<cplx> fixed_mu;              // nullopt: automatic selection
  std::vector<double> eps_schedule;          // strictly decreasing in (0, 1], last <= 1e-4
  std::vector<Eigen::Index> galerkin_dims;   // empty: {ceil(p/4), ceil(p/2), p}
  std::optional<CMatrix> galerkin_basis;     // p x p; columns span the nested spaces H_n+
  std::optional<double> contour_radius;      // nullopt: 2 max(1, spectral radius)
  int contour_nodes = 256;
  QuadratureRule rule = QuadratureRule::gauss_segments;
  bool check_quadrature_convergence = true;
  bool polish = true;                        // Newton refinement of the eps -> 0 limit
  int polish_max_iterations = 80;
  SolverTolerances tol;

  void validate() const;
};

/// eps_schedule = {1, 1/2, ..., 2^-14}, empty galerkin_dims.
SolverConfig default_solver_config();

std::vector<Eigen::Index> resolve_galerkin_dims(const SolverConfig& cfg, Eigen::Index p);

struct Estimate10 {
  double eps = 0.0;
  double a_plus_norm = 0.0;
  double lower_bound = 0.0;   // 2 eps / (pi ||A+||)
  double min_rayleigh = 0.0;  // min over x in L of [x,x]/(x,x)
  double slack = 0.0;         // min_rayleigh - lower_bound
  bool holds = false;
};

struct Estimate11 {
  double gamma = 0.0;  // ||G(mu)||
  double s_norm = 0.0;
  double mu_abs = 0.0;
  double bound = 0.0;  // 2(||S|| + gamma/(1-gamma)(||S|| + |mu|))
  double a_plus_norm = 0.0;
  double slack = 0.0;  // bound - ||A+||
  bool applicable = false;
  bool holds = false;
};

struct TraceCell {
  Eigen::Index n = 0;
  double eps = 0.0;
  double k_norm = 0.0;
  double k_step = std::numeric_limits<double>::quiet_NaN();  // ||K(eps_k) - K(eps_{k-1})|| at fixed n
  double k_to_full = std::numeric_limits<double>::quiet_NaN();  // ||K_n - K_p|| at the same eps
  double l_norm = 0.0;
  double l_bound = 0.0;  // 2 (c + |mu|)
  bool l_bound_ok = false;
  double min_im_restriction = 0.0;
  double riccati_residual = 0.0;
  double invariance_residual = 0.0;
  int quadrature_nodes = 0;
};

struct SolveReport {
  KreinStructure structure{1, 1};
  CMatrix k;                 // m x p angle operator
  CMatrix l_op;              // A21 + (A22 - mu) K
  CMatrix restriction;       // S + G L, similar to A restricted to graph(K)
  cplx mu{0.0, 0.0};
  double margin = 0.0;       // dissipativity margin of the operator solved
  double a_norm = 0.0;
  double s_norm = 0.0;
  double riccati_residual = 0.0;
  double invariance_residual = 0.0;
  std::vector<cplx> restriction_spectrum;
  double min_im_restriction = 0.0;
  double k_norm = 0.0;
  bool maximal = false;      // maximality_witness returned nothing
  Estimate10 estimate10;
  Estimate11 estimate11;
  std::vector<TraceCell> convergence_trace;
  double c_bound = 0.0;      // max over eps of ||i eps + S(mu + i eps)||
  bool cauchy_converged = true;
  double cauchy_tail_estimate = 0.0;
  int polish_iterations = 0;
  double unpolished_riccati_residual = 0.0;
  std::optional<StabilityReport> stability;
  bool stability_hypothesis_violated = false;

  // Contract flags, filled from the tolerances in use.
  bool k_norm_ok = false;
  bool riccati_ok = false;
  bool invariance_ok = false;
  bool spectrum_ok = false;

  /// ||K|| <= 1 + 1e-8, invariance residual <= 1e-7 ||A||, min Im >= -1e-6.
  bool acceptance_triple() const;
};

class NoCauchyConvergenceError : public Error {
 public:
  NoCauchyConvergenceError(const std::string& what, SolveReport report)
      : Error(ErrorKind::NoCauchyConvergence, what), report_(std::move(report)) {}
  const SolveReport& report() const noexcept { return report_; }

 private:
  SolveReport report_;
};

/// A + i eps J.
BlockOperator regularize(const BlockOperator& a, double eps);

/// Orthonormal basis of the first n columns of phi (p x n).
CMatrix galerkin_basis(const CMatrix& phi, Eigen::Index n);

/// Compression onto H_n+ (+) H- with H_n+ = span of the first n columns of basis_plus.
BlockOperator galerkin_truncate(const BlockOperator& a, Eigen::Index n, const CMatrix& basis_plus);

struct RiccatiResidual {
  double residual;
  CMatrix l_op;
};

/// L = A21 + (A22 - mu) K and ||L - K (S - mu + G L)||.
RiccatiResidual riccati_residual(const BlockOperator& a, const AngleOperator& k, cplx mu);

/// S(mu) + G(mu) L; its spectrum is the spectrum of A restricted to graph(K).
CMatrix restriction_matrix(const BlockOperator& a, const AngleOperator& k, cplx mu);

/// Automatic shift: start at i(1 + ||A22||) and double Im mu until
/// ||G(mu + i eps)|| < 1/2 for every eps in shifts.
cplx select_mu(const BlockOperator& a, const std::vector<double>& shifts);

SolveReport solve_uniformly_dissipative(const BlockOperator& a, const SolverConfig& cfg,
                                        std::optional<cplx> mu = std::nullopt);

/// Throws NotDissipative, ConditionIFailed, or NoCauchyConvergenceError (carrying the report).
SolveReport solve_theorem(const BlockOperator& a, const SolverConfig& cfg);

struct MaximalDissipativityReport {
  double margin = 0.0;
  double min_resolvent_defect = 0.0;  // min over sampled mu of sigma_min(JA - mu)
  bool pass = false;
};

MaximalDissipativityReport maximal_dissipativity_check(const BlockOperator& a, double tol = 1e-10);

/// Newton iteration for A21 + A22 K - K A11 - K A12 K = 0 started at k0.
struct PolishResult {
  CMatrix k;
  double residual;
  int iterations;
};
PolishResult polish_riccati(const BlockOperator& a, const CMatrix& k0, int max_iterations);

}  // namespace krein
