#pragma once

// ProblemFile v1, JSON reports and the CSV sidecar. Complex numbers are
// serialized as [re, im] pairs.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "krein/harness.hpp"
#include "krein/solver.hpp"

namespace krein::io {

struct ProblemFile {
  BlockOperator a;
  SolverConfig config;                 // defaults with the file's overrides applied
  std::optional<InstanceSpec> origin;  // present for generated problems
};

/// Throws Error(InvalidArgument) on malformed JSON, wrong version, inconsistent
/// shapes, or non-finite entries.
ProblemFile parse_problem(std::string_view text);
std::string serialize_problem(const BlockOperator& a, const std::optional<InstanceSpec>& origin = std::nullopt);

std::string report_to_json(const SolveReport& r, std::string_view status);

/// Re-reads the fields written by report_to_json and re-evaluates the acceptance triple.
bool acceptance_triple_from_json(std::string_view report_json);

struct SpectrumOutput {
  std::vector<cplx> spectrum_a;
  std::optional<std::vector<cplx>> spectrum_restriction;  // null when A is not dissipative
  double contour_radius = 0.0;
  int contour_nodes = 0;
  std::string contour_rule;
  std::optional<DecayProfile> g_decay;
};
std::string spectrum_to_json(const SpectrumOutput& s);

/// Sorted by Im descending, then Re ascending.
std::vector<cplx> sorted_spectrum(std::vector<cplx> values);

std::string suite_to_json(const SuiteReport& r);

inline constexpr std::string_view kCsvHeader =
    "seed,p,m,margin,K_norm,riccati_residual,invariance_residual,min_im_restriction,"
    "estimate10_slack,estimate11_slack,g_bound_ratio";

std::string csv_row(const PropertyRow& row);
std::string suite_to_csv(const SuiteReport& r);

}  // namespace krein::io
