#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "gac/grid.hpp"

using namespace gac;

TEST(MakeGrid, UpperExample) {
  const Grid2D g = make_grid(1.0, 3, 3, DomainKind::upper);
  EXPECT_EQ(g.x(0), -1.0);
  EXPECT_EQ(g.x(1), 0.0);
  EXPECT_EQ(g.x(2), 1.0);
  EXPECT_EQ(g.y(0), 0.0);
  EXPECT_EQ(g.y(1), 0.5);
  EXPECT_EQ(g.y(2), 1.0);
}

TEST(MakeGrid, FullExample) {
  const Grid2D g = make_grid(2.0, 5, 5, DomainKind::full);
  const double ys[5] = {-4, -2, 0, 2, 4};
  for (int j = 0; j < 5; ++j) EXPECT_EQ(g.y(j), ys[j]);
  EXPECT_EQ(g.hx(), 1.0);
  EXPECT_EQ(g.hy(), 2.0);
}

TEST(MakeGrid, RejectsEvenOrTinyCounts) {
  EXPECT_THROW(make_grid(1.0, 4, 3, DomainKind::upper), PreconditionError);
  EXPECT_THROW(make_grid(1.0, 3, 4, DomainKind::full), PreconditionError);
  EXPECT_THROW(make_grid(1.0, 1, 3, DomainKind::full), PreconditionError);
  EXPECT_THROW(make_grid(0.0, 3, 3, DomainKind::full), PreconditionError);
  EXPECT_THROW(make_grid(-1.0, 3, 3, DomainKind::full), PreconditionError);
}

TEST(MakeGrid, FullGridIsExactlySymmetric) {
  const Grid2D g = make_grid(12.0, 97, 577, DomainKind::full);
  for (int j = 0; j < g.ny(); ++j) EXPECT_EQ(g.y(g.ny() - 1 - j), -g.y(j));
  for (int i = 0; i < g.nx(); ++i) EXPECT_EQ(g.x(g.nx() - 1 - i), -g.x(i));
  EXPECT_EQ(g.x(g.center_col()), 0.0);
  EXPECT_EQ(g.y(g.zero_row()), 0.0);
}

TEST(MakeGrid, NodeOrderIsRowMajor) {
  const Grid2D g = make_grid(1.0, 5, 7, DomainKind::full);
  EXPECT_EQ(g.index(0, 0), 0u);
  EXPECT_EQ(g.index(4, 0), 4u);
  EXPECT_EQ(g.index(0, 1), 5u);
  EXPECT_EQ(g.col(g.index(3, 6)), 3);
  EXPECT_EQ(g.row(g.index(3, 6)), 6);
}

TEST(GrushinNorm, Examples) {
  EXPECT_EQ(grushin_norm(1.0, 0.0), 1.0);
  EXPECT_EQ(grushin_norm(0.0, 0.5), 1.0);
  EXPECT_NEAR(grushin_norm(1.0, 1.0), std::pow(5.0, 0.25), 1e-15);
  EXPECT_NEAR(grushin_norm(1.0, 1.0), 1.49535, 1e-5);
  EXPECT_EQ(grushin_norm(0.0, 0.0), 0.0);
}

TEST(GrushinNorm, AnisotropicScaling) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-5.0, 5.0), L(0.1, 10.0);
  for (int k = 0; k < 1000; ++k) {
    const double x = U(rng), y = U(rng), lam = L(rng);
    EXPECT_NEAR(grushin_norm(lam * x, lam * lam * y), lam * grushin_norm(x, y), 1e-12 * lam * (1 + grushin_norm(x, y)));
  }
}

TEST(BallMask, TinyBallOffNodesIsEmpty) {
  const Grid2D g = make_grid(1.0, 11, 11, DomainKind::full);
  EXPECT_TRUE(ball_mask(g, GrushinBall{0.05, 0.05, 0.01}).empty());
}

TEST(BallMask, HugeBallContainsEverything) {
  const Grid2D g = make_grid(1.0, 11, 11, DomainKind::full);
  EXPECT_EQ(ball_mask(g, GrushinBall{0.0, 0.0, 10.0}).size(), g.size());
}

TEST(BallMask, StrictInequality) {
  const Grid2D g = make_grid(1.0, 3, 3, DomainKind::full);
  // node (1, 0) has norm exactly 1
  const auto m = ball_mask(g, GrushinBall{0.0, 0.0, 1.0});
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0], g.index(1, 1));
  EXPECT_THROW(ball_mask(g, GrushinBall{0.0, 0.0, 0.0}), PreconditionError);
}

TEST(BallMask, UnitBallAreaConverges) {
  // area of {x^4 + 4 y^2 < 1} = integral of sqrt(1 - x^4) over [-1, 1]
  double area = 0.0;
  const int n = 2000000;
  for (int k = 0; k < n; ++k) {
    const double x = -1.0 + (k + 0.5) * 2.0 / n;
    area += std::sqrt(1.0 - x * x * x * x) * 2.0 / n;
  }
  double prev_err = 1.0;
  for (int m : {32, 64, 128, 256}) {
    const Grid2D g = make_grid(1.25, 2 * m + 1, 2 * m + 1, DomainKind::full);
    const double est = double(ball_mask(g, GrushinBall{0.0, 0.0, 1.0}).size()) * g.hx() * g.hy();
    const double err = std::abs(est - area);
    EXPECT_LT(err, 0.6 * prev_err + 1e-3);
    prev_err = err;
  }
  EXPECT_LT(prev_err, 1e-2);
}

TEST(Reflect, Examples) {
  const Grid2D g = make_grid(2.0, 9, 9, DomainKind::upper);
  const Field zero(g);
  EXPECT_EQ(reflect_odd(zero).max_abs(), 0.0);

  const Field y = Field::sample(g, [](double, double yy) { return yy; });
  const Field vy = reflect_odd(y);
  EXPECT_EQ(vy.grid().ny(), 17);
  for (int j = 0; j < vy.grid().ny(); ++j)
    for (int i = 0; i < vy.grid().nx(); ++i) EXPECT_EQ(vy(i, j), vy.grid().y(j));

  const Field yx2 = Field::sample(g, [](double x, double yy) { return yy * x * x; });
  const Field v = reflect_odd(yx2);
  const Field expect = Field::sample(v.grid(), [](double x, double yy) { return yy * x * x; });
  EXPECT_EQ(max_abs_difference(v, expect), 0.0);
}

TEST(Reflect, ExactAntisymmetryAndRoundTrip) {
  const Grid2D g = make_grid(3.0, 13, 11, DomainKind::upper);
  const Field u = Field::sample(g, [](double x, double y) { return std::sin(y) * std::cos(x) + y * y * y; });
  const Field v = reflect_odd(u);
  const Grid2D& fg = v.grid();
  for (int j = 0; j < fg.ny(); ++j)
    for (int i = 0; i < fg.nx(); ++i) EXPECT_EQ(v(i, fg.ny() - 1 - j), -v(i, j));
  EXPECT_EQ(max_abs_difference(restrict_upper(v), u), 0.0);
  // reflect . restrict is the identity on odd fields
  EXPECT_EQ(max_abs_difference(reflect_odd(restrict_upper(v)), v), 0.0);
}

TEST(Reflect, RejectsNonzeroTraceAndWrongKind) {
  const Grid2D g = make_grid(1.0, 5, 5, DomainKind::upper);
  Field u(g);
  u(2, 0) = 1e-9;
  EXPECT_THROW(reflect_odd(u), PreconditionError);
  u(2, 0) = 1e-11;
  EXPECT_NO_THROW(reflect_odd(u));
  EXPECT_THROW(reflect_odd(Field(make_grid(1.0, 5, 5, DomainKind::full))), PreconditionError);
  EXPECT_THROW(restrict_upper(u), PreconditionError);
}

TEST(Window, CenteredBoxRestriction) {
  const Grid2D g = make_grid(4.0, 33, 65, DomainKind::full);  // hx = 1/4, hy = 1/2
  const Field u = Field::sample(g, [](double x, double y) { return x + 10 * y; });
  const Field r = restrict_to_box(u, 2.0);
  EXPECT_EQ(r.grid().nx(), 17);
  EXPECT_EQ(r.grid().ny(), 17);
  EXPECT_DOUBLE_EQ(r.grid().hx(), g.hx());
  EXPECT_DOUBLE_EQ(r.grid().hy(), g.hy());
  for (int j = 0; j < r.grid().ny(); ++j)
    for (int i = 0; i < r.grid().nx(); ++i) EXPECT_DOUBLE_EQ(r(i, j), r.grid().x(i) + 10 * r.grid().y(j));
  // r = 1.5 gives a window whose y-extent 2.25 is not on the hy lattice
  EXPECT_THROW(restrict_to_box(u, 1.5), PreconditionError);
}

TEST(FieldCsv, RoundTripIsExact) {
  const Grid2D g = make_grid(1.5, 7, 9, DomainKind::full);
  const Field u = Field::sample(g, [](double x, double y) { return std::exp(x) * std::sin(3 * y) / 7.0; });
  std::stringstream ss;
  write_field_csv(ss, u);
  EXPECT_EQ(ss.str().substr(0, 10), "x,y,value\n");
  const Field v = read_field_csv(ss);
  EXPECT_TRUE(v.grid() == g);
  EXPECT_EQ(max_abs_difference(u, v), 0.0);
}

TEST(FieldCsv, RejectsBadInput) {
  std::stringstream bad("a,b,c\n0,0,0\n");
  EXPECT_THROW(read_field_csv(bad), PreconditionError);
  std::stringstream empty("");
  EXPECT_THROW(read_field_csv(empty), PreconditionError);
  std::stringstream ragged("x,y,value\n-1,0,0\n0,0,0\n1,0,0\n-1,1,0\n");
  EXPECT_THROW(read_field_csv(ragged), PreconditionError);
}

TEST(FieldType, SizeChecked) {
  const Grid2D g = make_grid(1.0, 3, 3, DomainKind::full);
  EXPECT_THROW(Field(g, std::vector<double>(8, 0.0)), PreconditionError);
  Field u(g);
  EXPECT_TRUE(u.all_finite());
  u[4] = NAN;
  EXPECT_FALSE(u.all_finite());
}
