#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gac/potential.hpp"

using gac::DoubleWell;

TEST(Potential, StandardValues) {
  const DoubleWell w = DoubleWell::standard();
  EXPECT_EQ(w.eval(1.0, 0), 0.0);
  EXPECT_EQ(w.eval(-1.0, 0), 0.0);
  EXPECT_EQ(w.eval(0.0, 1), 0.0);
  EXPECT_EQ(w.eval(0.0, 0), 0.25);
  EXPECT_EQ(w.eval(0.0, 2), -1.0);
  EXPECT_EQ(w.eval(1.0, 2), 2.0);
}

TEST(Potential, ClosedForms) {
  const DoubleWell w = DoubleWell::standard();
  for (double s = -2.0; s <= 2.0; s += 0.0625) {
    EXPECT_NEAR(w.W(s), 0.25 * (1 - s * s) * (1 - s * s), 1e-14);
    EXPECT_NEAR(w.dW(s), s * s * s - s, 1e-14);
    EXPECT_NEAR(w.d2W(s), 3 * s * s - 1, 1e-14);
  }
}

TEST(Potential, DerivativesMatchFiniteDifferences) {
  const DoubleWell w = DoubleWell::from_even_coefficients({0.25, -0.25, -0.25, 0.25});
  const double h = 1e-5;
  for (double s = -1.7; s <= 1.7; s += 0.1) {
    EXPECT_NEAR(w.dW(s), (w.W(s + h) - w.W(s - h)) / (2 * h), 1e-8);
    EXPECT_NEAR(w.d2W(s), (w.dW(s + h) - w.dW(s - h)) / (2 * h), 1e-8);
  }
}

TEST(Potential, BadOrderThrows) {
  const DoubleWell w = DoubleWell::standard();
  EXPECT_THROW(w.eval(0.0, 3), gac::PreconditionError);
  EXPECT_THROW(w.eval(0.0, -1), gac::PreconditionError);
}

TEST(Potential, Evenness) {
  const DoubleWell w = DoubleWell::standard();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  for (int k = 0; k < 1000; ++k) {
    const double s = U(rng);
    EXPECT_EQ(w.eval(s, 0), w.eval(-s, 0));
  }
}

TEST(Potential, RootSignPattern) {
  const DoubleWell w = DoubleWell::standard();
  for (double s : {-3.0, -1.5, -1.01}) EXPECT_LT(w.dW(s), 0.0);
  for (double s : {-0.99, -0.5, -0.01}) EXPECT_GT(w.dW(s), 0.0);
  for (double s : {0.01, 0.5, 0.99}) EXPECT_LT(w.dW(s), 0.0);
  for (double s : {1.01, 1.5, 3.0}) EXPECT_GT(w.dW(s), 0.0);
}

TEST(Potential, ValidationRejectsMalformedPolynomials) {
  // W(1) != 0
  EXPECT_THROW(DoubleWell::from_even_coefficients({0.3, -0.5, 0.25}), gac::PreconditionError);
  // negative somewhere: -(1 - s^2)^2 / 4
  EXPECT_THROW(DoubleWell::from_even_coefficients({-0.25, 0.5, -0.25}), gac::PreconditionError);
  // degenerate wells: (1 - s^2)^4, W''(1) = 0
  EXPECT_THROW(DoubleWell::from_even_coefficients({1.0, -4.0, 6.0, -4.0, 1.0}), gac::PreconditionError);
  // W''(0) = 0: (1 - s^4)^2 / 4 has W'' (0) = 0
  EXPECT_THROW(DoubleWell::from_even_coefficients({0.25, 0.0, -0.5, 0.0, 0.25}), gac::PreconditionError);
  // too few coefficients
  EXPECT_THROW(DoubleWell::from_even_coefficients({0.25}), gac::PreconditionError);
}

TEST(Potential, UserPolynomialAccepted) {
  const DoubleWell w = DoubleWell::from_even_coefficients({0.25, -0.25, -0.25, 0.25});
  EXPECT_FALSE(w.is_standard());
  EXPECT_NEAR(w.W(1.0), 0.0, 1e-15);
  EXPECT_NEAR(w.d2W(0.0), -0.5, 1e-15);
}

TEST(ReactionConstants, StandardOnSymmetricInterval) {
  const auto rc = gac::reaction_constants(DoubleWell::standard(), -1.0, 1.0);
  EXPECT_GE(rc.M, 2.4 - 1e-12);
  EXPECT_NEAR(rc.sup_abs_d2W, 2.0, 1e-12);
  EXPECT_EQ(rc.l, 1.0);
}

TEST(ReactionConstants, SmallInterval) {
  const auto rc = gac::reaction_constants(DoubleWell::standard(), -0.1, 0.1);
  EXPECT_GE(rc.M, 1.2 - 1e-12);
  EXPECT_NEAR(rc.sup_abs_d2W, 1.0, 1e-12);
  EXPECT_EQ(rc.l, 1.0);
}

TEST(ReactionConstants, InteriorMaximumIsRefined) {
  // |W''| for (1 - s^2)^2 (1 + s^2) / 4 peaks inside [0, 1]
  const DoubleWell w = DoubleWell::from_even_coefficients({0.25, -0.25, -0.25, 0.25});
  const auto rc = gac::reaction_constants(w, 0.0, 1.0);
  double brute = 0.0;
  for (int k = 0; k <= 1000000; ++k) brute = std::max(brute, std::abs(w.d2W(k * 1e-6)));
  EXPECT_GE(rc.sup_abs_d2W, brute - 1e-12);
  EXPECT_NEAR(rc.M, 1.2 * rc.sup_abs_d2W, 1e-15);
  EXPECT_NEAR(rc.l, 0.5, 1e-15);
}

TEST(ReactionConstants, Errors) {
  const DoubleWell w = DoubleWell::standard();
  EXPECT_THROW(gac::reaction_constants(w, 1.0, 0.0), gac::PreconditionError);
  EXPECT_THROW(gac::reaction_constants(w, 0.5, 1.0), gac::PreconditionError);
  EXPECT_THROW(gac::reaction_constants(w, -INFINITY, 1.0), gac::PreconditionError);
  EXPECT_THROW(gac::reaction_constants(w, 0.0, 1.0, 1.1), gac::PreconditionError);
}

TEST(ShiftedReaction, Examples) {
  const DoubleWell w = DoubleWell::standard();
  EXPECT_EQ(gac::shifted_reaction(w, 3.0, 0.0), 0.0);
  EXPECT_EQ(gac::shifted_reaction(w, 3.0, 1.0), 3.0);
  EXPECT_EQ(gac::shifted_reaction(w, 3.0, -1.0), -3.0);
}

TEST(ShiftedReaction, NondecreasingOnRandomPairs) {
  const DoubleWell w = DoubleWell::standard();
  const double M = gac::reaction_constants(w, -1.0, 1.0).M;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int k = 0; k < 10000; ++k) {
    double a = U(rng), b = U(rng);
    if (a > b) std::swap(a, b);
    EXPECT_LE(gac::shifted_reaction(w, M, a), gac::shifted_reaction(w, M, b));
  }
}
