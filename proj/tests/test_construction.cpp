#include <gtest/gtest.h>

#include <cmath>

#include "gac/construction.hpp"

using namespace gac;

namespace {

const DoubleWell kW = DoubleWell::standard();

// R = 8 needs the relaxed gate (lambda0 is about 0.8); shared by several tests
const ConstructionOutcome& relaxed_r8() {
  static const ConstructionOutcome o = [] {
    ConstructionConfig cc;
    cc.R = 8.0;
    cc.relaxed_gate = true;
    return construct(cc, kW);
  }();
  return o;
}

}  // namespace

TEST(BoundaryProfile, LinearSides) {
  const Grid2D g = make_grid(4.0, 17, 33, DomainKind::upper);
  const Field bc = boundary_profile(g);
  const double R2 = 16.0;
  EXPECT_EQ(profile_value(BoundaryProfile::linear, 0.0, 4.0), 0.0);
  EXPECT_EQ(profile_value(BoundaryProfile::linear, R2, 4.0), 1.0);
  EXPECT_EQ(profile_value(BoundaryProfile::linear, R2 / 2, 4.0), 0.5);
  for (int i = 0; i < g.nx(); ++i) {
    EXPECT_EQ(bc(i, 0), 0.0);
    EXPECT_EQ(bc(i, g.ny() - 1), 1.0);
  }
  for (int j = 0; j + 1 < g.ny(); ++j) {
    EXPECT_GT(bc(0, j + 1), bc(0, j));
    EXPECT_EQ(bc(0, j), bc(g.nx() - 1, j));
    EXPECT_GE(bc(0, j), 0.0);
    EXPECT_LE(bc(0, j), 1.0);
  }
  EXPECT_EQ(bc(0, 16), 0.5);
  EXPECT_THROW(boundary_profile(make_grid(4.0, 17, 33, DomainKind::full)), PreconditionError);
}

TEST(BoundaryProfile, LayerAlternativeHitsEndpoints) {
  EXPECT_EQ(profile_value(BoundaryProfile::layer, 0.0, 3.0), 0.0);
  EXPECT_NEAR(profile_value(BoundaryProfile::layer, 9.0, 3.0), 1.0, 1e-15);
  EXPECT_LT(profile_value(BoundaryProfile::layer, 1.0, 3.0), profile_value(BoundaryProfile::layer, 1.1, 3.0));
}

TEST(Subsolution, EpsMaxForStandardWell) {
  for (double lam : {0.05, 0.2, 0.33, 0.5, 0.9}) EXPECT_NEAR(admissible_eps_max(kW, lam), std::sqrt(1 - lam), 1e-9);
}

TEST(Subsolution, GateAndAdmissibilityAtR12) {
  ConstructionConfig cc;
  cc.R = 12.0;
  const Grid2D g = make_grid(cc.R, cc.resolved_nx(), cc.resolved_ny(), DomainKind::upper);
  EXPECT_EQ(g.nx(), 97);
  EXPECT_EQ(g.ny(), 289);
  const Subsolution s = build_subsolution(g, kW, 0.5);
  EXPECT_LE(s.lambda0, 0.5);
  EXPECT_FALSE(s.relaxed_gate_used);
  EXPECT_NEAR(s.rho, 5.75, 1e-15);
  EXPECT_EQ(s.ball.x0, 6.25);
  EXPECT_EQ(s.ball.y0, 72.0);
  EXPECT_NEAR(s.eps, 0.9 * std::sqrt(1 - s.lambda0), 1e-9);
  std::vector<bool> in(g.size(), false);
  for (std::size_t k : interior_ball_mask(g, s.ball)) in[k] = true;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double v = s.v0[k];
    EXPECT_LE(s.lambda0 * v, std::abs(kW.dW(v)) + 1e-15);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, s.eps);
    if (!in[k]) {
      EXPECT_EQ(v, 0.0);
    }
  }
}

TEST(Subsolution, GateFailsAtSmallR) {
  const Grid2D g = make_grid(2.0, 17, 9, DomainKind::upper);
  try {
    build_subsolution(g, kW, 0.5);
    FAIL() << "expected GateError";
  } catch (const GateError& e) {
    EXPECT_NE(std::string(e.what()).find("λ₀ gate failed; increase R or use --relaxed-gate"), std::string::npos);
  }
  // lambda0 > l here, so even the relaxed gate refuses
  EXPECT_THROW(build_subsolution(g, kW, 0.5, true), GateError);
  EXPECT_THROW(build_subsolution(make_grid(2.0, 17, 9, DomainKind::full), kW, 0.5), PreconditionError);
  EXPECT_THROW(build_subsolution(g, kW, 2.5), PreconditionError);
}

TEST(MonotoneIterate, ZeroIsStationary) {
  const Grid2D g = make_grid(2.0, 17, 9, DomainKind::upper);
  const IterationResult r = monotone_iterate(g, kW, 2.4, Field(g), Field(g));
  EXPECT_EQ(r.u_tilde.max_abs(), 0.0);
  EXPECT_EQ(r.report.outer_iters, 1);
  EXPECT_TRUE(r.report.converged);
}

TEST(MonotoneIterate, NonSubsolutionStartTripsOrdering) {
  const Grid2D g = make_grid(2.0, 17, 9, DomainKind::upper);
  Field v0(g);
  for (std::size_t k : interior_mask(g)) v0[k] = 0.9;
  EXPECT_THROW(monotone_iterate(g, kW, 2.4, v0, Field(g)), OrderingError);
  IterateConfig cfg;
  cfg.throw_on_violation = false;
  const IterationResult r = monotone_iterate(g, kW, 2.4, v0, Field(g), cfg);
  EXPECT_GT(r.report.monotone.count, 0u);
  EXPECT_GT(r.report.subsolution.max_violation, 0.0);
  EXPECT_LT(r.report.first_step_min, 0.0);
}

TEST(MonotoneIterate, Errors) {
  const Grid2D g = make_grid(2.0, 17, 9, DomainKind::upper);
  const Field z(g);
  EXPECT_THROW(monotone_iterate(g, kW, -1.0, z, z), PreconditionError);
  EXPECT_THROW(monotone_iterate(g, kW, 2.4, Field(make_grid(2.0, 17, 11, DomainKind::upper)), z), PreconditionError);
  IterateConfig tight;
  tight.it_tol = 1e-9;  // only 10 x the solver tolerance
  EXPECT_THROW(monotone_iterate(g, kW, 2.4, z, z, tight), PreconditionError);
  IterateConfig capped;
  capped.max_outer = 2;
  EXPECT_THROW(monotone_iterate(g, kW, 2.4, z, boundary_profile(g), capped), ConvergenceError);
}

TEST(Construct, RelaxedGateRunSatisfiesOrderingProperties) {
  const ConstructionOutcome& o = relaxed_r8();
  const IterationReport& r = o.iter.report;
  EXPECT_TRUE(o.sub.relaxed_gate_used);
  EXPECT_LT(o.sub.lambda0, 1.0);
  EXPECT_GT(o.sub.lambda0, 0.5);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.outer_iters, 500);
  EXPECT_LT(r.increments.back(), 1e-8);
  EXPECT_TRUE(r.monotone.pass());
  EXPECT_TRUE(r.confinement.pass());
  EXPECT_TRUE(r.subsolution.pass());
  EXPECT_GE(r.first_step_min, -1e-9);
  EXPECT_TRUE(o.mono_hypothesis.pass());
  // the limit dominates the subsolution and is not identically zero
  for (std::size_t k = 0; k < o.grid.size(); ++k) EXPECT_GE(o.iter.u_tilde[k], o.sub.v0[k] - 1e-9);
  EXPECT_GT(o.iter.u_tilde.max_abs(), 0.0);
  // the y-monotone boundary data transfers to the solution
  const Field& u = o.iter.u_tilde;
  for (int j = 0; j + 1 < o.grid.ny(); ++j)
    for (int i = 1; i + 1 < o.grid.nx(); ++i) EXPECT_GT(u(i, j + 1), u(i, j));
}

TEST(Construct, ReflectedSolution) {
  const ConstructionOutcome& o = relaxed_r8();
  const Field& v = o.full.v_R;
  const Grid2D& fg = v.grid();
  for (int j = 0; j < fg.ny(); ++j)
    for (int i = 0; i < fg.nx(); ++i) EXPECT_EQ(v(i, fg.ny() - 1 - j), -v(i, j));
  EXPECT_EQ(max_abs_difference(restrict_upper(v), o.iter.u_tilde), 0.0);
  EXPECT_EQ(o.full.origin_residual, 0.0);
  EXPECT_LT(o.fixed_point_residual, 1e-6);
  EXPECT_GT(o.pde_residual, 0.0);
}

TEST(Construct, ReportHasFixedKeys) {
  const nlohmann::ordered_json j = construction_json(relaxed_r8());
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  const std::vector<std::string> expect = {"R",  "nx", "ny",          "a",          "rho",        "lambda0",
                                           "eps", "M",  "outer_iters", "increments", "violations", "fixed_point_residual",
                                           "pde_residual"};
  EXPECT_EQ(keys, expect);
  EXPECT_EQ(j["increments"].size(), std::size_t(j["outer_iters"].get<int>()));
  EXPECT_TRUE(j["violations"]["monotone"]["pass"].get<bool>());
}

TEST(Construct, StandardGateRejectsR8) {
  ConstructionConfig cc;
  cc.R = 8.0;
  EXPECT_THROW(construct(cc, kW), GateError);
}

TEST(Construct, DefaultResolution) {
  ConstructionConfig cc;
  for (double R : {8.0, 12.0, 16.0}) {
    cc.R = R;
    EXPECT_EQ(cc.resolved_nx(), int(8 * R) + 1);
    EXPECT_EQ(cc.resolved_ny(), int(2 * R * R) + 1);
  }
  cc.nx = 41;
  cc.ny = 0;
  cc.R = 10.0;  // hx = 1/2, hy = 1
  EXPECT_EQ(cc.resolved_ny(), 101);
}
