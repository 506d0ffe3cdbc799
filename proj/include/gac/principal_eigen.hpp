#ifndef GAC_PRINCIPAL_EIGEN_HPP
#define GAC_PRINCIPAL_EIGEN_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "gac/errors.hpp"
#include "gac/grid.hpp"
#include "gac/grushin_operator.hpp"
#include "gac/linear_solver.hpp"

namespace gac {

struct InversePowerOptions {
  double rayleigh_rel = 1e-10;  ///< stop once the Rayleigh quotient moves less than this (relative)
  double residual_tol = 1e-6;   ///< bound on ||A phi - mu phi||_inf for sup-normalized phi
  bool residual_relative = true;  ///< scale residual_tol by |mu - offset|
  double offset = 0.0;          ///< shift subtracted from mu to obtain the reported eigenvalue
  int max_iter = 2000;
};

struct InversePowerResult {
  std::vector<double> phi;  ///< on the unknowns, sup-normalized, nonnegative
  double mu = 0.0;          ///< Rayleigh quotient of the assembled (shifted) operator
  double residual = 0.0;    ///< ||A phi - mu phi||_inf
  int iterations = 0;
};

/// Smallest eigenpair of an assembled SPD Dirichlet system by inverse
/// iteration with a positive start vector.
inline InversePowerResult inverse_power(const DirichletSystem& sys, const SolverConfig& cfg,
                                        const InversePowerOptions& opt) {
  const std::size_t n = sys.unknowns();
  std::vector<double> phi(n, 1.0), w(n, 0.0), aphi(n);
  double mu_prev = 0.0;
  InversePowerResult out;
  for (int it = 1; it <= opt.max_iter; ++it) {
    // warm start: the next iterate is close to phi / mu
    if (it > 1)
      for (std::size_t k = 0; k < n; ++k) w[k] = phi[k] / mu_prev;
    sys.pcg(phi, w, cfg);
    double sup = 0.0;
    for (double v : w) sup = std::max(sup, std::abs(v));
    require(sup > 0.0, "inverse_power: iterate vanished");
    // the principal eigenvector is one-signed; fix the sign to be positive
    double sum = 0.0;
    for (double v : w) sum += v;
    const double scale = (sum >= 0.0 ? 1.0 : -1.0) / sup;
    for (std::size_t k = 0; k < n; ++k) phi[k] = w[k] * scale;
    sys.apply(phi, aphi);
    const double mu = detail::dot(phi, aphi) / detail::dot(phi, phi);
    double res = 0.0;
    for (std::size_t k = 0; k < n; ++k) res = std::max(res, std::abs(aphi[k] - mu * phi[k]));
    out = InversePowerResult{phi, mu, res, it};
    const double lam = mu - opt.offset;
    const double tol = opt.residual_relative ? opt.residual_tol * std::abs(lam) : opt.residual_tol;
    if (it > 1 && std::abs(mu - mu_prev) <= opt.rayleigh_rel * std::abs(mu) && res <= tol) return out;
    mu_prev = mu;
  }
  throw ConvergenceError("inverse_power: no convergence in " + std::to_string(opt.max_iter) +
                             " iterations (residual " + std::to_string(out.residual) + ")",
                         out.residual);
}

struct EigenResult {
  double lambda = 0.0;
  Field phi;              ///< 0 off the ball mask, max 1
  double residual = 0.0;  ///< ||-Delta_G phi - lambda phi||_inf / lambda over the mask
  GrushinBall ball;
  double a = 0.0;         ///< distance of the ball from the line x = 0
  int iterations = 0;
  std::size_t mask_size = 0;
};

struct EigenConfig {
  SolverConfig solver{};
  double shift = 1e-8;
  double residual_tol = 1e-6;
  double rayleigh_rel = 1e-10;
  int max_iter = 2000;
};

/// Principal Dirichlet eigenpair of -Delta_G on a Grushin ball that does not
/// meet the degenerate line x = 0.
inline EigenResult principal_eigenpair(const Grid2D& g, const GrushinBall& ball,
                                       const EigenConfig& cfg = {}) {
  const double a = std::abs(ball.x0) - ball.radius;
  require(a > 0.0, "principal_eigenpair: ball must not meet the line x = 0");
  std::vector<std::size_t> mask = interior_ball_mask(g, ball);
  require(!mask.empty(), "principal_eigenpair: ball mask is empty");
  for (std::size_t k : mask)
    require(std::abs(g.x(g.col(k))) >= a, "principal_eigenpair: mask touches the line x = 0");

  const std::size_t n = mask.size();
  DirichletSystem sys(g, mask, std::vector<double>(n, cfg.shift));
  InversePowerOptions opt;
  opt.rayleigh_rel = cfg.rayleigh_rel;
  opt.residual_tol = cfg.residual_tol;
  opt.residual_relative = true;
  opt.offset = cfg.shift;
  opt.max_iter = cfg.max_iter;
  const InversePowerResult ip = inverse_power(sys, cfg.solver, opt);

  EigenResult out;
  out.phi = Field(g);
  for (std::size_t k = 0; k < n; ++k) out.phi[mask[k]] = std::max(0.0, ip.phi[k]);
  double l2 = 0.0;
  for (double v : out.phi.values()) l2 += v * v;
  out.lambda = grushin_dirichlet_form(out.phi) / (l2 * g.hx() * g.hy());
  const Field lap = apply_laplacian(out.phi);
  double res = 0.0;
  for (std::size_t k : mask) res = std::max(res, std::abs(-lap[k] - out.lambda * out.phi[k]));
  out.residual = res / out.lambda;
  out.ball = ball;
  out.a = a;
  out.iterations = ip.iterations;
  out.mask_size = n;
  return out;
}

struct ScalingRow {
  double rho = 0.0;
  double lambda = 0.0;
  double lambda_rho_sq = 0.0;
  int nx = 0, ny = 0;
  std::size_t mask_size = 0;
};

/// Full grid that resolves the ball centred at (a + rho, 0) of radius rho with
/// `per_diameter` cells across its x-extent and across its y-extent rho^2.
inline Grid2D scaling_grid(double a, double rho, int per_diameter = 32) {
  require(a > 0.0 && rho > 0.0, "scaling_grid: need a > 0 and rho > 0");
  require(per_diameter >= 16, "scaling_grid: need at least 16 cells across the ball");
  const double hx = 2.0 * rho / per_diameter;
  const int k = int(std::ceil((a + 2.0 * rho) / hx - 1e-9)) + 1;
  const double Rg = k * hx;
  const double hy_target = rho * rho / per_diameter;
  const int m = int(std::ceil(Rg * Rg / hy_target - 1e-9));
  return make_grid(Rg, 2 * k + 1, 2 * m + 1, DomainKind::full);
}

/// lambda(rho) on balls centred at (a + rho, 0), each on its own grid.
inline std::vector<ScalingRow> eigen_scaling_sweep(double a, std::vector<double> radii,
                                                   const EigenConfig& cfg = {}) {
  require(a > 0.0, "eigen_scaling_sweep: a must be positive");
  std::sort(radii.begin(), radii.end());
  std::vector<ScalingRow> rows;
  for (double rho : radii) {
    const Grid2D g = scaling_grid(a, rho);
    const EigenResult e = principal_eigenpair(g, GrushinBall{a + rho, 0.0, rho}, cfg);
    rows.push_back(ScalingRow{rho, e.lambda, e.lambda * rho * rho, g.nx(), g.ny(), e.mask_size});
  }
  return rows;
}

}  // namespace gac

#endif  // GAC_PRINCIPAL_EIGEN_HPP
