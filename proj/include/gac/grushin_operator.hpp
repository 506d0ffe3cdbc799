#ifndef GAC_GRUSHIN_OPERATOR_HPP
#define GAC_GRUSHIN_OPERATOR_HPP

#include <algorithm>
#include <cmath>
#include <limits>

#include "gac/errors.hpp"
#include "gac/grid.hpp"
#include "gac/potential.hpp"

namespace gac {

// Five-point Grushin Laplacian u_xx + x^2 u_yy with the x^2 coefficient taken
// at the node. On the column x = 0 the y-coupling vanishes identically.

inline double laplacian_at(const Field& u, int i, int j) noexcept {
  const Grid2D& g = u.grid();
  const double x = g.x(i);
  const double c = u(i, j);
  const double uxx = (u(i + 1, j) - 2.0 * c + u(i - 1, j)) / (g.hx() * g.hx());
  const double uyy = (u(i, j + 1) - 2.0 * c + u(i, j - 1)) / (g.hy() * g.hy());
  return uxx + x * x * uyy;
}

/// Interior nodes carry the stencil value; boundary nodes carry 0.
inline Field apply_laplacian(const Field& u) {
  const Grid2D& g = u.grid();
  Field out(g);
  for (int j = 1; j < g.ny() - 1; ++j)
    for (int i = 1; i < g.nx() - 1; ++i) out(i, j) = laplacian_at(u, i, j);
  return out;
}

/// (u_x)^2 + x^2 (u_y)^2 with central differences inside and one-sided
/// differences on the boundary.
inline Field gradient_sq(const Field& u) {
  const Grid2D& g = u.grid();
  const int nx = g.nx(), ny = g.ny();
  Field out(g);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      double ux, uy;
      if (i == 0)
        ux = (u(1, j) - u(0, j)) / g.hx();
      else if (i == nx - 1)
        ux = (u(i, j) - u(i - 1, j)) / g.hx();
      else
        ux = (u(i + 1, j) - u(i - 1, j)) / (2.0 * g.hx());
      if (j == 0)
        uy = (u(i, 1) - u(i, 0)) / g.hy();
      else if (j == ny - 1)
        uy = (u(i, j) - u(i, j - 1)) / g.hy();
      else
        uy = (u(i, j + 1) - u(i, j - 1)) / (2.0 * g.hy());
      const double x = g.x(i);
      out(i, j) = ux * ux + x * x * uy * uy;
    }
  return out;
}

struct ResidualResult {
  Field field;
  double interior_max = 0.0;
};

/// Delta_G u - W'(u) on interior nodes (0 on the boundary).
inline ResidualResult pde_residual(const Field& u, const DoubleWell& w) {
  const Grid2D& g = u.grid();
  ResidualResult r{Field(g), 0.0};
  for (int j = 1; j < g.ny() - 1; ++j)
    for (int i = 1; i < g.nx() - 1; ++i) {
      const double v = laplacian_at(u, i, j) - w.dW(u(i, j));
      r.field(i, j) = v;
      r.interior_max = std::max(r.interior_max, std::abs(v));
    }
  return r;
}

/// Delta_G u - W'(u) evaluated with fourth-order central differences on nodes
/// at least two away from the boundary. For a grid solution of the five-point
/// scheme this measures the O(h^2) consistency error of the scheme.
inline ResidualResult consistency_residual(const Field& u, const DoubleWell& w) {
  const Grid2D& g = u.grid();
  require(g.nx() >= 5 && g.ny() >= 5, "consistency_residual: need at least 5 nodes per direction");
  const double cx = 1.0 / (12.0 * g.hx() * g.hx());
  const double cy = 1.0 / (12.0 * g.hy() * g.hy());
  ResidualResult r{Field(g), 0.0};
  for (int j = 2; j < g.ny() - 2; ++j)
    for (int i = 2; i < g.nx() - 2; ++i) {
      const double c = u(i, j);
      const double uxx =
          cx * (-u(i + 2, j) + 16.0 * u(i + 1, j) - 30.0 * c + 16.0 * u(i - 1, j) - u(i - 2, j));
      const double uyy =
          cy * (-u(i, j + 2) + 16.0 * u(i, j + 1) - 30.0 * c + 16.0 * u(i, j - 1) - u(i, j - 2));
      const double x = g.x(i);
      const double v = uxx + x * x * uyy - w.dW(c);
      r.field(i, j) = v;
      r.interior_max = std::max(r.interior_max, std::abs(v));
    }
  return r;
}

/// Trapezoidal quadrature of a field over the nodes listed in `mask`.
template <class Mask>
double integrate_over(const Field& f, const Mask& mask) {
  const Grid2D& g = f.grid();
  double acc = 0.0;
  for (std::size_t k : mask) acc += g.quadrature_weight(g.col(k), g.row(k)) * f[k];
  return acc * g.hx() * g.hy();
}

inline double integrate(const Field& f) {
  const Grid2D& g = f.grid();
  double acc = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) acc += g.quadrature_weight(i, j) * f(i, j);
  return acc * g.hx() * g.hy();
}

/// Edge-based Dirichlet form sum over grid edges of (d_x u)^2 + x_i^2 (d_y u)^2,
/// times hx*hy. Equals -sum u * Delta_G u * hx*hy for u vanishing on the boundary.
inline double grushin_dirichlet_form(const Field& u) {
  const Grid2D& g = u.grid();
  double ex = 0.0, ey = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i + 1 < g.nx(); ++i) {
      const double d = u(i + 1, j) - u(i, j);
      ex += d * d;
    }
  for (int j = 0; j + 1 < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const double d = u(i, j + 1) - u(i, j);
      const double x = g.x(i);
      ey += x * x * d * d;
    }
  return (ex / (g.hx() * g.hx()) + ey / (g.hy() * g.hy())) * g.hx() * g.hy();
}

/// Same form with the Euclidean gradient (coefficient 1 on y-edges).
inline double euclidean_dirichlet_form(const Field& u) {
  const Grid2D& g = u.grid();
  double ex = 0.0, ey = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i + 1 < g.nx(); ++i) {
      const double d = u(i + 1, j) - u(i, j);
      ex += d * d;
    }
  for (int j = 0; j + 1 < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const double d = u(i, j + 1) - u(i, j);
      ey += d * d;
    }
  return (ex / (g.hx() * g.hx()) + ey / (g.hy() * g.hy())) * g.hx() * g.hy();
}

/// psi(x,y) = (x^4 + 4 y^2)^(-1/4), Delta_G-harmonic away from the origin.
inline double fundamental_solution(double x, double y) noexcept { return 1.0 / grushin_norm(x, y); }

struct FundamentalSolutionCheck {
  double max_residual = 0.0;
  std::size_t nodes = 0;
};

/// max |Delta_G psi| over interior nodes with r_inner <= ||zeta|| < r_outer.
inline FundamentalSolutionCheck fundamental_solution_check(double r_inner, double r_outer,
                                                           const Grid2D& g) {
  require(0.0 < r_inner && r_inner < r_outer, "fundamental_solution_check: need 0 < r_inner < r_outer");
  FundamentalSolutionCheck out;
  for (int j = 1; j < g.ny() - 1; ++j)
    for (int i = 1; i < g.nx() - 1; ++i) {
      const double n = grushin_norm(g.x(i), g.y(j));
      if (n < r_inner || n >= r_outer) continue;
      // psi sampled on the 5-point neighbourhood only; the origin never enters
      // because every neighbour has norm > 0 unless it is the origin itself.
      auto psi = [&](int ii, int jj) { return fundamental_solution(g.x(ii), g.y(jj)); };
      const double c = psi(i, j);
      const double x = g.x(i);
      const double lap = (psi(i + 1, j) - 2.0 * c + psi(i - 1, j)) / (g.hx() * g.hx()) +
                         x * x * (psi(i, j + 1) - 2.0 * c + psi(i, j - 1)) / (g.hy() * g.hy());
      require(std::isfinite(lap), "fundamental_solution_check: stencil reaches the origin; refine the grid");
      out.max_residual = std::max(out.max_residual, std::abs(lap));
      ++out.nodes;
    }
  require(out.nodes > 0, "fundamental_solution_check: empty annulus");
  return out;
}

}  // namespace gac

#endif  // GAC_GRUSHIN_OPERATOR_HPP
