#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gac/grushin_operator.hpp"
#include "gac/linear_solver.hpp"

using namespace gac;

namespace {

const SolverConfig kTight{1e-12, 0};

double manufactured(double x, double y, double R) {
  return std::sin(std::numbers::pi * x / R) * y * y * (R * R - y) * (R * R - y);
}

// M u* - Delta_G u* for u* = sin(pi x / R) y^2 (R^2 - y)^2
double manufactured_rhs(double x, double y, double R, double M) {
  const double k = std::numbers::pi / R;
  const double s = std::sin(k * x);
  const double p = y * y * (R * R - y) * (R * R - y);
  // p'' for p = y^2 (R^2 - y)^2 = R^4 y^2 - 2 R^2 y^3 + y^4
  const double ppp = 2 * R * R * R * R - 12 * R * R * y + 12 * y * y;
  const double lap = -k * k * s * p + x * x * s * ppp;
  return M * s * p - lap;
}

}  // namespace

TEST(ShiftedSolve, ConstantsReproduced) {
  const Grid2D g = make_grid(1.0, 17, 17, DomainKind::upper);
  const double M = 2.4, c = 0.37;
  const SolveResult r = solve_shifted_dirichlet(g, interior_mask(g), M, Field(g, M * c), Field(g, c), kTight);
  EXPECT_LE(max_abs_difference(r.u, Field(g, c)), 1e-12);
  EXPECT_LE(r.stats.relative_residual, kTight.rel_tol);
}

TEST(ShiftedSolve, ZeroDataGivesZero) {
  const Grid2D g = make_grid(1.0, 9, 9, DomainKind::full);
  const SolveResult r = solve_shifted_dirichlet(g, interior_mask(g), 1.0, Field(g), Field(g), kTight);
  EXPECT_EQ(r.u.max_abs(), 0.0);
  EXPECT_EQ(r.stats.iterations, 0);
}

TEST(ShiftedSolve, ManufacturedSolutionSecondOrder) {
  const double R = 2.0, M = 2.4;
  std::vector<double> err;
  for (int m : {8, 16, 32, 64}) {
    const Grid2D g = make_grid(R, 2 * m + 1, 2 * m + 1, DomainKind::upper);
    const Field exact = Field::sample(g, [&](double x, double y) { return manufactured(x, y, R); });
    const Field rhs = Field::sample(g, [&](double x, double y) { return manufactured_rhs(x, y, R, M); });
    const SolveResult r = solve_shifted_dirichlet(g, interior_mask(g), M, rhs, exact, kTight);
    err.push_back(max_abs_difference(r.u, exact));
  }
  for (std::size_t k = 0; k + 1 < err.size(); ++k) EXPECT_NEAR(std::log2(err[k] / err[k + 1]), 2.0, 0.2);
}

TEST(ShiftedSolve, MaximumPrinciple) {
  const Grid2D g = make_grid(3.0, 25, 31, DomainKind::upper);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    Field rhs(g), bc(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
      rhs[k] = U(rng) < 0.1 ? U(rng) : 0.0;
      bc[k] = U(rng) < 0.5 ? U(rng) : 0.0;
    }
    const SolveResult r = solve_shifted_dirichlet(g, interior_mask(g), 0.5, rhs, bc, {1e-10, 0});
    for (double v : r.u.values()) EXPECT_GE(v, -10 * 1e-10 * r.u.max_abs());
  }
}

TEST(ShiftedSolve, Comparison) {
  const Grid2D g = make_grid(3.0, 25, 31, DomainKind::full);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> U(-1.0, 1.0), P(0.0, 1.0);
  Field r1(g), r2(g), b1(g), b2(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    r1[k] = U(rng);
    r2[k] = r1[k] + P(rng);
    b1[k] = U(rng);
    b2[k] = b1[k] + 0.1 * P(rng);
  }
  const double M = 2.4, tol = 1e-10;
  const SolveResult u1 = solve_shifted_dirichlet(g, interior_mask(g), M, r1, b1, {tol, 0});
  const SolveResult u2 = solve_shifted_dirichlet(g, interior_mask(g), M, r2, b2, {tol, 0});
  const double scale = std::max(u1.u.max_abs(), u2.u.max_abs());
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_LE(u1.u[k], u2.u[k] + 10 * tol * scale);
}

TEST(ShiftedSolve, OffMaskValuesAreBoundaryValues) {
  const Grid2D g = make_grid(1.0, 9, 9, DomainKind::full);
  std::vector<std::size_t> mask;
  for (std::size_t k : interior_mask(g))
    if (g.col(k) > g.center_col()) mask.push_back(k);
  const Field bc = Field::sample(g, [](double x, double y) { return x + y; });
  const SolveResult r = solve_shifted_dirichlet(g, mask, 0.0, Field(g), bc, kTight);
  std::vector<bool> in(g.size(), false);
  for (std::size_t k : mask) in[k] = true;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!in[k]) {
      EXPECT_EQ(r.u[k], bc[k]);
    }
  }
  // Delta_G (x + y) = 0 and the data is linear, so the solve reproduces it
  EXPECT_LE(max_abs_difference(r.u, bc), 1e-10);
}

TEST(ShiftedSolve, Errors) {
  const Grid2D g = make_grid(1.0, 9, 9, DomainKind::full);
  const Field z(g);
  EXPECT_THROW(solve_shifted_dirichlet(g, interior_mask(g), -1.0, z, z, kTight), PreconditionError);
  // zero shift with unknowns on x = 0 is rejected
  EXPECT_THROW(solve_shifted_dirichlet(g, interior_mask(g), 0.0, z, z, kTight), PreconditionError);
  EXPECT_THROW(solve_shifted_dirichlet(g, {}, 1.0, z, z, kTight), PreconditionError);
  EXPECT_THROW(solve_shifted_dirichlet(g, {0}, 1.0, z, z, kTight), PreconditionError);  // boundary node
  EXPECT_THROW(solve_shifted_dirichlet(g, interior_mask(g), 1.0, z, z, SolverConfig{0.0, 0}), PreconditionError);
  EXPECT_THROW(solve_shifted_dirichlet(g, interior_mask(g), 1.0, z, z, SolverConfig{1.5, 0}), PreconditionError);
  const Grid2D other = make_grid(1.0, 11, 9, DomainKind::full);
  EXPECT_THROW(solve_shifted_dirichlet(g, interior_mask(g), 1.0, Field(other), z, kTight), PreconditionError);
}

TEST(ShiftedSolve, NonConvergenceReportsLastResidual) {
  const Grid2D g = make_grid(2.0, 33, 33, DomainKind::full);
  const Field rhs = Field::sample(g, [](double x, double y) { return std::sin(3 * x) * std::cos(y); });
  try {
    solve_shifted_dirichlet(g, interior_mask(g), 1.0, rhs, Field(g), SolverConfig{1e-12, 3});
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.last_residual(), 1e-12);
  }
}

TEST(ShiftedSolve, Deterministic) {
  const Grid2D g = make_grid(2.0, 33, 65, DomainKind::full);
  const Field rhs = Field::sample(g, [](double x, double y) { return std::exp(-x * x - y * y); });
  const SolveResult a = solve_shifted_dirichlet(g, interior_mask(g), 1.0, rhs, Field(g), {1e-10, 0});
  const SolveResult b = solve_shifted_dirichlet(g, interior_mask(g), 1.0, rhs, Field(g), {1e-10, 0});
  EXPECT_EQ(a.u.values(), b.u.values());
  EXPECT_EQ(a.stats.iterations, b.stats.iterations);
}
