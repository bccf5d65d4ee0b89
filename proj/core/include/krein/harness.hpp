#pragma once

// Random J-dissipative instances and the batch property suite.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "krein/random.hpp"
#include "krein/solver.hpp"

namespace krein {

struct InstanceSpec {
  Eigen::Index p = 2;
  Eigen::Index m = 2;
  double margin = 0.0;           // dissipativity margin, attained exactly
  double a22_decay = 0.5;        // A22 gets -i diag(a22_decay * (k + 1)) before the margin shift
  double coupling_scale = 1.0;   // scale of the off-diagonal blocks
  std::uint64_t seed = 0;
  double hermitian_scale = 1.0;  // size of the random positive part before the shift to `margin`
  double real_scale = 1.0;       // size of the Hermitian real part R
  bool anti_dissipative = false; // negative control: returns -A

  void validate() const;
};

/// JA = R + iH with H >= margin (Hermitian), A = J(R + iH), plus the A22 decay term.
/// Deterministic under the seed.
BlockOperator random_dissipative(const InstanceSpec& spec);

struct PropertyRow {
  InstanceSpec spec;
  double measured_margin = 0.0;
  std::string status = "ok";  // ok | NotDissipative | ConditionIFailed | NoCauchyConvergence | <error kind>
  double k_norm = 0.0;
  double riccati_residual = 0.0;
  double invariance_residual = 0.0;
  double min_im_restriction = 0.0;
  double estimate10_slack = 0.0;
  double estimate11_slack = 0.0;
  double g_bound_ratio = 0.0;
  double factorization_residual = 0.0;
  double identity_residual = 0.0;  // resolvent and eps-shift identities
  double asymptotics_c_ratio = 0.0;
  double cauchy_tail_estimate = 0.0;
  bool k_steps_monotone_after_burn_in = false;
  std::map<std::string, bool> checks;
  bool pass = false;
  std::optional<CMatrix> offending_matrix;  // persisted for failed rows
};

struct SuiteOptions {
  std::vector<double> regularizations{1.0, 0.1, 0.01};
  int factorization_mu_samples = 10;
  int g_bound_samples = 50;
  int identity_samples = 5;
  int burn_in = 3;
};

struct SuiteReport {
  std::vector<PropertyRow> rows;
  int failures = 0;
  int no_cauchy = 0;
  double worst_riccati = 0.0;
  double worst_invariance_rel = 0.0;
  double worst_min_im = 0.0;
  double worst_estimate10_slack = 0.0;
  double worst_estimate11_slack = 0.0;
  double worst_g_bound_ratio = 0.0;
  bool pass() const { return failures == 0; }
};

/// Evaluates the full invariant list on a given operator; `meta` labels the row
/// and seeds the sampling.
PropertyRow evaluate_operator(const BlockOperator& a, const InstanceSpec& meta, const SolverConfig& cfg,
                              const SuiteOptions& opt = {});

/// Evaluates the full invariant list on one generated instance.
PropertyRow evaluate_instance(const InstanceSpec& spec, const SolverConfig& cfg, const SuiteOptions& opt = {});

/// Instances run in parallel; rows keep the input order.
SuiteReport run_property_suite(const std::vector<InstanceSpec>& specs, const SolverConfig& cfg,
                               const SuiteOptions& opt = {});

/// Differences ||K(eps_k) - K(eps_{k+1})|| decrease monotonically after `burn_in` steps.
bool monotone_after_burn_in(const std::vector<double>& steps, int burn_in);

/// Samples in the closed upper half-plane, a few on the real axis.
std::vector<cplx> upper_half_plane_samples(CounterRng& rng, int count, double scale);

}  // namespace krein
