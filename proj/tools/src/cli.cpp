#include "krein_cli/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "krein/harness.hpp"
#include "krein/problem_io.hpp"
#include "krein/solver.hpp"
#include "krein/spectral_projector.hpp"

namespace krein::cli {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::InvalidArgument, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes to a temporary next to the target and renames it into place.
void write_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
    if (!o) fail(ErrorKind::InvalidArgument, "cannot write " + path);
    o << text;
    if (!o) fail(ErrorKind::InvalidArgument, "cannot write " + path);
  }
  std::filesystem::rename(tmp, path);
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text << std::flush;
  } else {
    write_atomic(path, text);
  }
}

int exit_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::NotDissipative:
    case ErrorKind::ConditionIFailed: return kNotDissipative;
    case ErrorKind::NoCauchyConvergence: return kNoConvergence;
    default: return kInputError;
  }
}

struct GenerateArgs {
  long long p = 2, m = 2;
  double margin = 0.0, coupling = 1.0, decay = 0.5;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_generate(const GenerateArgs& g, std::ostream& out) {
  if (g.p < 1 || g.m < 1) fail(ErrorKind::InvalidArgument, "--p and --m must be >= 1");
  InstanceSpec s;
  s.p = g.p;
  s.m = g.m;
  s.margin = g.margin;
  s.coupling_scale = g.coupling;
  s.a22_decay = g.decay;
  s.seed = g.seed;
  s.validate();
  emit(g.out, io::serialize_problem(random_dissipative(s), s), out);
  return kPass;
}

struct SolveArgs {
  std::string problem, out;
};

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  const io::ProblemFile pf = io::parse_problem(read_file(a.problem));
  try {
    const SolveReport r = solve_theorem(pf.a, pf.config);
    const std::string text = io::report_to_json(r, "ok");
    emit(a.out, text, out);
    return io::acceptance_triple_from_json(text) ? kPass : kSuiteFail;
  } catch (const NoCauchyConvergenceError& e) {
    emit(a.out, io::report_to_json(e.report(), "NoCauchyConvergence"), out);
    err << "solve: " << e.what() << "\n";
    return kNoConvergence;
  }
}

struct VerifyArgs {
  std::string problem, csv, out;
  bool suite = false;
  bool inject_anti = false;
  int seeds = 10;
  long long p = 3, m = 3;
  double margin = 0.5, coupling = 1.0;
  std::uint64_t seed0 = 0;
};

int cmd_verify(const VerifyArgs& v, std::ostream& out, std::ostream& err) {
  SuiteReport rep;
  SolverConfig cfg = default_solver_config();
  if (v.suite) {
    if (v.p < 1 || v.m < 1 || v.seeds < 1) fail(ErrorKind::InvalidArgument, "--p, --m and --seeds must be >= 1");
    std::vector<InstanceSpec> specs;
    for (int k = 0; k < v.seeds; ++k) {
      InstanceSpec s;
      s.p = v.p;
      s.m = v.m;
      s.margin = v.margin;
      s.coupling_scale = v.coupling;
      s.seed = v.seed0 + static_cast<std::uint64_t>(k);
      s.validate();
      specs.push_back(s);
    }
    if (v.inject_anti) {
      InstanceSpec s = specs.back();
      s.seed += 1;
      s.anti_dissipative = true;
      specs.push_back(s);
    }
    rep = run_property_suite(specs, cfg);
  } else {
    if (v.problem.empty()) fail(ErrorKind::InvalidArgument, "verify needs a problem file or --suite");
    const io::ProblemFile pf = io::parse_problem(read_file(v.problem));
    InstanceSpec meta = pf.origin.value_or(InstanceSpec{});
    meta.p = pf.a.structure().p();
    meta.m = pf.a.structure().m();
    if (!pf.origin) meta.margin = std::max(0.0, dissipativity_margin(pf.a));
    rep.rows.push_back(evaluate_operator(pf.a, meta, pf.config));
    const PropertyRow& row = rep.rows.front();
    rep.failures = row.pass ? 0 : 1;
    rep.no_cauchy = row.status == "NoCauchyConvergence" ? 1 : 0;
    rep.worst_riccati = row.riccati_residual;
    rep.worst_min_im = row.min_im_restriction;
    rep.worst_estimate10_slack = row.estimate10_slack;
    rep.worst_estimate11_slack = row.estimate11_slack;
    rep.worst_g_bound_ratio = row.g_bound_ratio;
  }
  if (!v.csv.empty()) write_atomic(v.csv, io::suite_to_csv(rep));
  emit(v.out, io::suite_to_json(rep), out);

  err << "verify: " << rep.rows.size() << " instance(s), " << rep.failures << " failure(s), " << rep.no_cauchy
      << " without Cauchy convergence\n";
  for (const auto& row : rep.rows) {
    if (row.pass) continue;
    err << "  seed " << row.spec.seed << " (" << row.status << ")";
    for (const auto& [name, ok] : row.checks) {
      if (!ok) err << " " << name;
    }
    err << "\n";
  }
  if (!v.suite) {
    const auto& st = rep.rows.front().status;
    if (st == "NotDissipative" || st == "ConditionIFailed") return kNotDissipative;
  }
  return rep.pass() ? kPass : kSuiteFail;
}

struct SpectrumArgs {
  std::string problem, out;
  std::vector<double> profile;
  int nodes = 256;
};

int cmd_spectrum(const SpectrumArgs& s, std::ostream& out, std::ostream& err) {
  const io::ProblemFile pf = io::parse_problem(read_file(s.problem));
  const CMatrix a = pf.a.assemble();
  io::SpectrumOutput o;
  const CVector ev = numerics::eigenvalues(a);
  o.spectrum_a.assign(ev.data(), ev.data() + ev.size());
  Contour c = auto_contour(a, s.nodes);
  if (pf.config.contour_radius) c.radius = *pf.config.contour_radius;
  c.rule = pf.config.rule;
  o.contour_radius = c.radius;
  o.contour_nodes = c.nodes;
  o.contour_rule = c.rule == QuadratureRule::trapezoid ? "trapezoid" : "gauss_segments";
  if (!s.profile.empty()) o.g_decay = g_decay_profile(pf.a, s.profile);
  int code = kPass;
  try {
    const SolveReport r = solve_theorem(pf.a, pf.config);
    o.spectrum_restriction = r.restriction_spectrum;
  } catch (const NoCauchyConvergenceError& e) {
    o.spectrum_restriction = e.report().restriction_spectrum;
    err << "spectrum: " << e.what() << "\n";
    code = kNoConvergence;
  } catch (const Error& e) {
    if (exit_for(e.kind()) == kInputError) throw;
    // no restriction to report; the spectrum of A and the profile still are
    err << "spectrum: " << e.what() << "\n";
  }
  emit(s.out, io::spectrum_to_json(o), out);
  return code;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Maximal nonnegative invariant subspaces of J-dissipative operators", "krein"};
  app.require_subcommand(1);

  GenerateArgs g;
  auto* gen = app.add_subcommand("generate", "write a random J-dissipative problem");
  gen->add_option("--p", g.p, "dimension of H+")->required();
  gen->add_option("--m", g.m, "dimension of H-")->required();
  gen->add_option("--margin", g.margin, "dissipativity margin");
  gen->add_option("--coupling", g.coupling, "scale of A12 and A21");
  gen->add_option("--a22-decay", g.decay, "A22 gets -i diag(decay (k+1))");
  gen->add_option("--seed", g.seed, "generator seed");
  gen->add_option("--out", g.out, "output file (default stdout)");

  SolveArgs sv;
  auto* solve = app.add_subcommand("solve", "compute K and the invariant subspace");
  solve->add_option("problem", sv.problem, "problem file")->required();
  solve->add_option("--out", sv.out, "report file (default stdout)");

  VerifyArgs vf;
  auto* verify = app.add_subcommand("verify", "run the property checks");
  verify->add_option("problem", vf.problem, "problem file");
  verify->add_flag("--suite", vf.suite, "generate a random suite instead of reading a file");
  verify->add_option("--seeds", vf.seeds, "number of suite instances");
  verify->add_option("--seed0", vf.seed0, "first suite seed");
  verify->add_option("--p", vf.p, "suite dimension of H+");
  verify->add_option("--m", vf.m, "suite dimension of H-");
  verify->add_option("--margin", vf.margin, "suite dissipativity margin");
  verify->add_option("--coupling", vf.coupling, "suite coupling scale");
  verify->add_flag("--inject-anti-dissipative", vf.inject_anti, "append a negative control row");
  verify->add_option("--csv", vf.csv, "CSV sidecar path");
  verify->add_option("--out", vf.out, "suite report file (default stdout)");

  SpectrumArgs sp;
  auto* spectrum = app.add_subcommand("spectrum", "spectra, contour and G decay profile");
  spectrum->add_option("problem", sp.problem, "problem file")->required();
  spectrum->add_option("--profile", sp.profile, "heights h for ||G(i h)||")->delimiter(',');
  spectrum->add_option("--nodes", sp.nodes, "contour node budget");
  spectrum->add_option("--out", sp.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kInputError;
  }

  try {
    if (*gen) return cmd_generate(g, out);
    if (*solve) return cmd_solve(sv, out, err);
    if (*verify) return cmd_verify(vf, out, err);
    if (*spectrum) return cmd_spectrum(sp, out, err);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace krein::cli
