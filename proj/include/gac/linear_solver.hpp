#ifndef GAC_LINEAR_SOLVER_HPP
#define GAC_LINEAR_SOLVER_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gac/errors.hpp"
#include "gac/grid.hpp"

namespace gac {

struct SolverConfig {
  double rel_tol = 1e-10;
  int max_iter = 0;  ///< 0 selects 10 * (number of unknowns)
};

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
  double seconds = 0.0;
};

struct SolveResult {
  Field u;
  SolveStats stats;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  // fixed left-to-right order: results are bit-reproducible
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace detail

/// The Dirichlet problem (c - Delta_G) u = rhs on a set of interior nodes,
/// with values off the mask supplied by a boundary field. c >= 0 is a
/// per-node shift. The matrix is a symmetric M-matrix; it is assembled once
/// and can be solved against many right-hand sides.
class DirichletSystem {
 public:
  static constexpr int kNone = -1;

  DirichletSystem(const Grid2D& g, std::vector<std::size_t> mask, std::vector<double> shift)
      : grid_(g), mask_(std::move(mask)), shift_(std::move(shift)) {
    require(!mask_.empty(), "DirichletSystem: empty mask");
    require(shift_.size() == mask_.size(), "DirichletSystem: shift size must match mask size");
    require(std::is_sorted(mask_.begin(), mask_.end()) &&
                std::adjacent_find(mask_.begin(), mask_.end()) == mask_.end(),
            "DirichletSystem: mask must be strictly increasing");
    const std::size_t n = mask_.size();
    std::vector<int> slot(g.size(), kNone);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t node = mask_[k];
      require(node < g.size(), "DirichletSystem: mask index out of range");
      require(!g.is_boundary(g.col(node), g.row(node)), "DirichletSystem: mask contains a boundary node");
      require(std::isfinite(shift_[k]) && shift_[k] >= 0.0,
              "DirichletSystem: shift must be nonnegative (indefinite system rejected)");
      if (g.col(node) == g.center_col())
        require(shift_[k] > 0.0, "DirichletSystem: shift must be positive on the line x = 0");
      slot[node] = int(k);
    }
    const double cx = 1.0 / (g.hx() * g.hx());
    nbr_.assign(4 * n, kNone);
    ext_.assign(4 * n, 0);
    coef_.resize(4 * n);
    diag_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const int i = g.col(mask_[k]), j = g.row(mask_[k]);
      const double x = g.x(i);
      const double cy = x * x / (g.hy() * g.hy());
      const std::size_t nb[4] = {g.index(i + 1, j), g.index(i - 1, j), g.index(i, j + 1), g.index(i, j - 1)};
      const double cf[4] = {cx, cx, cy, cy};
      for (int d = 0; d < 4; ++d) {
        coef_[4 * k + d] = cf[d];
        nbr_[4 * k + d] = slot[nb[d]];
        ext_[4 * k + d] = nb[d];
      }
      diag_[k] = shift_[k] + 2.0 * cx + 2.0 * cy;
    }
  }

  const Grid2D& grid() const noexcept { return grid_; }
  const std::vector<std::size_t>& mask() const noexcept { return mask_; }
  std::size_t unknowns() const noexcept { return mask_.size(); }
  double diagonal(std::size_t k) const noexcept { return diag_[k]; }

  /// y = A x on the unknowns, with homogeneous boundary values.
  void apply(std::span<const double> x, std::span<double> y) const noexcept {
    const std::size_t n = mask_.size();
    for (std::size_t k = 0; k < n; ++k) {
      double acc = diag_[k] * x[k];
      for (int d = 0; d < 4; ++d) {
        const int s = nbr_[4 * k + d];
        if (s != kNone) acc -= coef_[4 * k + d] * x[std::size_t(s)];
      }
      y[k] = acc;
    }
  }

  /// Right-hand side on the unknowns with boundary values eliminated.
  std::vector<double> eliminated_rhs(const Field& rhs, const Field& boundary) const {
    std::vector<double> b(mask_.size());
    for (std::size_t k = 0; k < mask_.size(); ++k) {
      double acc = rhs[mask_[k]];
      for (int d = 0; d < 4; ++d)
        if (nbr_[4 * k + d] == kNone) acc += coef_[4 * k + d] * boundary[ext_[4 * k + d]];
      b[k] = acc;
    }
    return b;
  }

  /// Jacobi-preconditioned conjugate gradients on A x = b. `x` holds the
  /// initial guess on entry. Throws ConvergenceError after max_iter steps.
  SolveStats pcg(std::span<const double> b, std::span<double> x, const SolverConfig& cfg) const {
    require(cfg.rel_tol > 0.0 && cfg.rel_tol < 1.0, "SolverConfig: rel_tol must lie in (0, 1)");
    require(cfg.max_iter >= 0, "SolverConfig: max_iter must be >= 1 (or 0 for the default)");
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t n = mask_.size();
    const int max_iter = cfg.max_iter > 0 ? cfg.max_iter : int(10 * n);
    SolveStats st;
    const double bnorm = std::sqrt(detail::dot(b, b));
    if (bnorm == 0.0) {
      std::fill(x.begin(), x.end(), 0.0);
      st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      return st;
    }
    std::vector<double> r(n), z(n), p(n), q(n);
    auto true_residual = [&]() {
      apply(x, r);
      for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - r[k];
      return std::sqrt(detail::dot(r, r)) / bnorm;
    };
    double rel = true_residual();
    int it = 0;
    // restart from the true residual if the recursive one drifted below tol
    for (int sweep = 0; sweep < 4 && rel > cfg.rel_tol && it < max_iter; ++sweep) {
      for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / diag_[k];
      p = z;
      double rz = detail::dot(r, z);
      while (it < max_iter) {
        apply(p, q);
        const double alpha = rz / detail::dot(p, q);
        for (std::size_t k = 0; k < n; ++k) {
          x[k] += alpha * p[k];
          r[k] -= alpha * q[k];
        }
        ++it;
        if (std::sqrt(detail::dot(r, r)) / bnorm <= 0.5 * cfg.rel_tol) break;
        for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / diag_[k];
        const double rz_new = detail::dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
      }
      rel = true_residual();
    }
    st.iterations = it;
    st.relative_residual = rel;
    st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (rel > cfg.rel_tol)
      throw ConvergenceError("linear solver: no convergence in " + std::to_string(max_iter) +
                                 " iterations (relative residual " + std::to_string(rel) + ")",
                             rel);
    return st;
  }

  /// Full solve: u = boundary off the mask, (c - Delta_G) u = rhs on it.
  SolveResult solve(const Field& rhs, const Field& boundary, const SolverConfig& cfg,
                    const Field* guess = nullptr) const {
    require(rhs.grid() == grid_ && boundary.grid() == grid_, "DirichletSystem::solve: grid mismatch");
    const std::vector<double> b = eliminated_rhs(rhs, boundary);
    std::vector<double> x(mask_.size(), 0.0);
    if (guess != nullptr) {
      require(guess->grid() == grid_, "DirichletSystem::solve: guess grid mismatch");
      for (std::size_t k = 0; k < mask_.size(); ++k) x[k] = (*guess)[mask_[k]];
    }
    SolveResult res{boundary, {}};
    res.stats = pcg(b, x, cfg);
    for (std::size_t k = 0; k < mask_.size(); ++k) res.u[mask_[k]] = x[k];
    return res;
  }

 private:
  Grid2D grid_;
  std::vector<std::size_t> mask_;
  std::vector<double> shift_;
  std::vector<int> nbr_;
  std::vector<std::size_t> ext_;
  std::vector<double> coef_;
  std::vector<double> diag_;
};

/// (M - Delta_G) u = rhs on `mask`, u = boundary elsewhere.
inline SolveResult solve_shifted_dirichlet(const Grid2D& g, std::vector<std::size_t> mask, double M,
                                           const Field& rhs, const Field& boundary,
                                           const SolverConfig& cfg, const Field* guess = nullptr) {
  require(std::isfinite(M) && M >= 0.0, "solve_shifted_dirichlet: shift M must be >= 0");
  const std::size_t n = mask.size();
  DirichletSystem sys(g, std::move(mask), std::vector<double>(n, M));
  return sys.solve(rhs, boundary, cfg, guess);
}

}  // namespace gac

#endif  // GAC_LINEAR_SOLVER_HPP
