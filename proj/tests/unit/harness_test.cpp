#include "krein/harness.hpp"
#include "test_support.hpp"

namespace krein {
namespace {

using namespace test;
using numerics::operator_norm;

TEST(RandomDissipative, DecoupledConstructionIsIJ) {
  InstanceSpec s;
  s.p = 3;
  s.m = 2;
  s.margin = 1.0;
  s.coupling_scale = 0.0;
  s.real_scale = 0.0;
  s.hermitian_scale = 0.0;
  s.a22_decay = 0.0;
  const auto a = random_dissipative(s);
  EXPECT_LT(dist(a.a11(), i1 * CMatrix::Identity(3, 3)), 1e-14);
  EXPECT_LT(dist(a.a22(), -i1 * CMatrix::Identity(2, 2)), 1e-14);
  EXPECT_EQ(operator_norm(a.a12()), 0.0);
  EXPECT_EQ(operator_norm(a.a21()), 0.0);
  EXPECT_NEAR(dissipativity_margin(a), 1.0, 1e-14);
}

TEST(RandomDissipative, Deterministic) {
  InstanceSpec s;
  s.p = 4;
  s.m = 3;
  s.seed = 99;
  EXPECT_EQ(random_dissipative(s).assemble(), random_dissipative(s).assemble());
  InstanceSpec t = s;
  t.seed = 100;
  EXPECT_NE(random_dissipative(s).assemble(), random_dissipative(t).assemble());
}

TEST(RandomDissipative, MarginAttained) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    InstanceSpec s;
    s.p = 4;
    s.m = 4;
    s.margin = 0.25;
    s.seed = seed;
    const double got = dissipativity_margin(random_dissipative(s));
    EXPECT_GE(got, 0.25 - 1e-10);
    EXPECT_NEAR(got, 0.25, 1e-10);
  }
}

TEST(RandomDissipative, AntiDissipativeControl) {
  InstanceSpec s;
  s.margin = 0.5;
  s.anti_dissipative = true;
  EXPECT_LT(dissipativity_margin(random_dissipative(s)), 0.0);
}

TEST(RandomDissipative, RejectsInvalidSpec) {
  InstanceSpec s;
  s.p = 0;
  EXPECT_KREIN_ERROR(random_dissipative(s), ErrorKind::InvalidArgument);
  s.p = 2;
  s.margin = -1.0;
  EXPECT_KREIN_ERROR(random_dissipative(s), ErrorKind::InvalidArgument);
}

std::vector<InstanceSpec> seeds(int count, Eigen::Index p, Eigen::Index m, double margin) {
  std::vector<InstanceSpec> out;
  for (int k = 0; k < count; ++k) {
    InstanceSpec s;
    s.p = p;
    s.m = m;
    s.margin = margin;
    s.seed = std::uint64_t(k);
    out.push_back(s);
  }
  return out;
}

TEST(PropertySuite, TenSeedsAllPass) {
  const auto r = run_property_suite(seeds(10, 3, 3, 0.5), default_solver_config());
  ASSERT_EQ(r.rows.size(), 10u);
  for (const auto& row : r.rows) {
    EXPECT_TRUE(row.pass) << "seed " << row.spec.seed << " " << row.status;
    for (const auto& [name, ok] : row.checks) EXPECT_TRUE(ok) << "seed " << row.spec.seed << " " << name;
  }
  EXPECT_TRUE(r.pass());
  for (std::size_t k = 0; k < r.rows.size(); ++k) EXPECT_EQ(r.rows[k].spec.seed, k);
}

TEST(PropertySuite, AntiDissipativeRowFails) {
  auto specs = seeds(3, 2, 2, 0.5);
  specs[1].anti_dissipative = true;
  const auto r = run_property_suite(specs, default_solver_config());
  EXPECT_FALSE(r.pass());
  EXPECT_EQ(r.failures, 1);
  EXPECT_EQ(r.rows[1].status, "NotDissipative");
  EXPECT_FALSE(r.rows[1].pass);
  ASSERT_TRUE(r.rows[1].offending_matrix.has_value());
  EXPECT_EQ(*r.rows[1].offending_matrix, random_dissipative(specs[1]).assemble());
  EXPECT_TRUE(r.rows[0].pass && r.rows[2].pass);
}

TEST(PropertySuite, DecoupledGivesZeroK) {
  auto specs = seeds(4, 3, 2, 0.2);
  for (auto& s : specs) s.coupling_scale = 0.0;
  const auto r = run_property_suite(specs, default_solver_config());
  for (const auto& row : r.rows) {
    EXPECT_TRUE(row.pass) << row.status;
    EXPECT_LT(row.k_norm, 1e-12);
  }
}

TEST(PropertySuite, ZeroMarginInstances) {
  const auto r = run_property_suite(seeds(3, 3, 3, 0.0), default_solver_config());
  for (const auto& row : r.rows) {
    EXPECT_TRUE(row.status == "ok" || row.status == "NoCauchyConvergence") << row.status;
    EXPECT_LE(row.k_norm, 1.0 + 1e-8);
    EXPECT_GE(row.min_im_restriction, -1e-6);
  }
}

TEST(Maximality, DroppingAColumnLeavesAWitness) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    InstanceSpec s;
    s.p = 3;
    s.m = 3;
    s.margin = 0.3;
    s.seed = seed;
    const auto a = random_dissipative(s);
    const auto r = solve_theorem(a, default_solver_config());
    const Subspace l = subspace_from_angle_operator(AngleOperator(a.structure(), r.k));
    EXPECT_FALSE(maximality_witness(l).has_value());
    const Subspace dropped(a.structure(), l.basis().leftCols(2));
    const auto w = maximality_witness(dropped);
    ASSERT_TRUE(w.has_value());
    EXPECT_NEAR(w->norm(), 1.0, 1e-12);
  }
}

TEST(Covariance, Scaling) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    InstanceSpec s;
    s.p = 3;
    s.m = 2;
    s.margin = 0.4;
    s.seed = seed;
    const auto a = random_dissipative(s);
    SolverConfig cfg = default_solver_config();
    const cplx mu = select_mu(a, cfg.eps_schedule);
    const double radius = auto_contour(a.assemble()).radius;
    cfg.fixed_mu = mu;
    cfg.contour_radius = radius;
    const auto base = solve_theorem(a, cfg);
    for (double sc : {0.5, 3.0}) {
      const auto scaled = assemble(sc * a.a11(), sc * a.a12(), sc * a.a21(), sc * a.a22());
      SolverConfig cs = cfg;
      cs.fixed_mu = sc * mu;
      cs.contour_radius = sc * radius;
      const auto r = solve_theorem(scaled, cs);
      EXPECT_LT(dist(r.k, base.k), 1e-8) << "scale " << sc;
    }
  }
}

TEST(Covariance, BlockUnitary) {
  CounterRng rng(77);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    InstanceSpec s;
    s.p = 3;
    s.m = 3;
    s.margin = 0.2;
    s.seed = seed;
    const auto a = random_dissipative(s);
    const CMatrix up = rng.haar_unitary(3), um = rng.haar_unitary(3);
    const auto b = assemble(up * a.a11() * up.adjoint(), up * a.a12() * um.adjoint(), um * a.a21() * up.adjoint(),
                            um * a.a22() * um.adjoint());
    const auto ka = solve_theorem(a, default_solver_config()).k;
    const auto kb = solve_theorem(b, default_solver_config()).k;
    EXPECT_LT(dist(kb, um * ka * up.adjoint()), 1e-8);
  }
}

TEST(HarnessHelpers, MonotoneAfterBurnIn) {
  EXPECT_TRUE(monotone_after_burn_in({1.0, 0.5, 0.25, 0.1}, 0));
  EXPECT_TRUE(monotone_after_burn_in({0.1, 0.5, 0.25, 0.1}, 1));
  EXPECT_FALSE(monotone_after_burn_in({0.1, 0.5, 0.25, 0.3}, 1));
  EXPECT_TRUE(monotone_after_burn_in({0.5, 0.2, 1e-15, 2e-15}, 0));
}

TEST(HarnessHelpers, UpperHalfPlaneSamples) {
  CounterRng rng(5);
  const auto z = upper_half_plane_samples(rng, 50, 3.0);
  ASSERT_EQ(z.size(), 50u);
  int on_axis = 0;
  for (cplx w : z) {
    EXPECT_GE(w.imag(), 0.0);
    on_axis += w.imag() == 0.0;
  }
  EXPECT_GT(on_axis, 0);
}

}  // namespace
}  // namespace krein
