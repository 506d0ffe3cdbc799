#ifndef GAC_CONSTRUCTION_HPP
#define GAC_CONSTRUCTION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "gac/errors.hpp"
#include "gac/grid.hpp"
#include "gac/grushin_operator.hpp"
#include "gac/linear_solver.hpp"
#include "gac/potential.hpp"
#include "gac/principal_eigen.hpp"
#include "gac/tolerances.hpp"

namespace gac {

enum class BoundaryProfile { linear, layer };

inline const char* to_string(BoundaryProfile p) { return p == BoundaryProfile::linear ? "linear" : "layer"; }

/// Side-edge profile psi(y) on [0, R^2] with psi(0) = 0, psi(R^2) = 1 and
/// psi strictly increasing. `layer` is a normalized tanh ramp of unit width,
/// kept for sensitivity runs.
inline double profile_value(BoundaryProfile p, double y, double R) {
  const double R2 = R * R;
  if (p == BoundaryProfile::linear) return y / R2;
  return std::tanh(y / std::sqrt(2.0)) / std::tanh(R2 / std::sqrt(2.0));
}

/// Dirichlet data on the boundary of Q_R^+: 0 at the bottom, 1 at the top,
/// psi(y) on x = +-R. Interior nodes are 0.
inline Field boundary_profile(const Grid2D& g, BoundaryProfile p = BoundaryProfile::linear) {
  require(g.kind() == DomainKind::upper, "boundary_profile: expected an upper grid");
  Field bc(g);
  const int nx = g.nx(), ny = g.ny();
  for (int j = 0; j < ny; ++j) {
    const double psi = profile_value(p, g.y(j), g.R());
    bc(0, j) = psi;
    bc(nx - 1, j) = psi;
  }
  for (int i = 0; i < nx; ++i) {
    bc(i, 0) = 0.0;
    bc(i, ny - 1) = 1.0;
  }
  return bc;
}

/// Largest eps in (0, 1] with lambda0 * s <= |W'(s)| on (0, eps].
inline double admissible_eps_max(const DoubleWell& w, double lambda0) {
  auto ok = [&](double s) { return lambda0 * s <= std::abs(w.dW(s)); };
  constexpr int kSamples = 100000;
  double last_ok = 0.0;
  for (int k = 1; k <= kSamples; ++k) {
    const double s = double(k) / kSamples;
    if (!ok(s)) {
      double lo = last_ok, hi = s;
      for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
      }
      return lo;
    }
    last_ok = s;
  }
  return 1.0;
}

struct Subsolution {
  Field v0;
  double lambda0 = 0.0;
  double eps = 0.0;
  double eps_max = 0.0;
  GrushinBall ball;
  double rho = 0.0;
  std::size_t ball_nodes = 0;
  bool relaxed_gate_used = false;
};

/// v0 = eps * phi0 on the auto-placed ball B (centre (a + rho, R^2/2),
/// rho = (R - a)/2), 0 elsewhere. Throws GateError unless lambda0 <= l/2
/// (or lambda0 < l with the relaxed gate).
inline Subsolution build_subsolution(const Grid2D& g, const DoubleWell& w, double a, bool relaxed_gate = false,
                                     const EigenConfig& ecfg = {}) {
  require(g.kind() == DomainKind::upper, "build_subsolution: expected an upper grid");
  require(a > 0.0 && a < g.R(), "build_subsolution: need 0 < a < R");
  const double R = g.R();
  const double rho = 0.5 * (R - a);
  const GrushinBall ball{a + rho, 0.5 * R * R, rho};
  require(!interior_ball_mask(g, ball).empty(), "build_subsolution: ball mask is empty");
  const EigenResult e = principal_eigenpair(g, ball, ecfg);
  const double l = std::abs(w.d2W(0.0));

  Subsolution s;
  s.lambda0 = e.lambda;
  s.ball = ball;
  s.rho = rho;
  s.ball_nodes = e.mask_size;
  if (e.lambda > 0.5 * l) {
    if (!relaxed_gate || e.lambda >= l)
      throw GateError("λ₀ gate failed; increase R or use --relaxed-gate (lambda0 = " + std::to_string(e.lambda) +
                      ", l/2 = " + std::to_string(0.5 * l) + ")");
    s.relaxed_gate_used = true;
  }
  s.eps_max = admissible_eps_max(w, e.lambda);
  s.eps = 0.9 * s.eps_max;
  s.v0 = Field(g);
  for (std::size_t k = 0; k < g.size(); ++k) s.v0[k] = s.eps * e.phi[k];
  return s;
}

struct OrderingStat {
  std::size_t count = 0;
  double max_violation = 0.0;
  bool pass() const noexcept { return count == 0; }
  void record(double violation) {
    if (violation > 0.0) {
      ++count;
      max_violation = std::max(max_violation, violation);
    }
  }
};

struct IterateConfig {
  double it_tol = 1e-8;
  int max_outer = 500;
  double ordering_slack = 1e-9;  ///< 10 * solver rel_tol
  SolverConfig solver{};
  bool throw_on_violation = true;
};

struct IterationReport {
  int outer_iters = 0;
  std::vector<double> increments;
  OrderingStat monotone;     ///< u_{k+1} >= u_k
  OrderingStat confinement;  ///< 0 <= u_k <= 1
  OrderingStat subsolution;  ///< u_k >= v0
  double first_step_min = 0.0;  ///< min (T v0 - v0) over the interior
  bool converged = false;
  long long inner_iterations = 0;
};

struct IterationResult {
  Field u_tilde;
  IterationReport report;
};

/// Monotone iteration u_{k+1} = T(u_k), where T v solves
/// (M - Delta_G) u = g(v) = -W'(v) + M v with the Dirichlet data `bc`.
///
/// Written in correction form u_{k+1} = u_k + d with
/// (M - Delta_G) d = Delta_G u_k - W'(u_k), d = 0 on the boundary, so the
/// solver tolerance is relative to the size of the update.
inline IterationResult monotone_iterate(const Grid2D& g, const DoubleWell& w, double M, const Field& v0,
                                        const Field& bc, const IterateConfig& cfg = {}) {
  require(v0.grid() == g && bc.grid() == g, "monotone_iterate: grid mismatch");
  require(M >= 0.0, "monotone_iterate: M must be >= 0");
  require(cfg.it_tol >= 100.0 * cfg.solver.rel_tol * (1.0 - 1e-12),
          "monotone_iterate: it_tol must be at least 100 x the solver tolerance");
  const std::vector<std::size_t> mask = interior_mask(g);
  const DirichletSystem sys(g, mask, std::vector<double>(mask.size(), M));
  const Field zero(g);

  Field u = v0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i)
      if (g.is_boundary(i, j)) u(i, j) = bc(i, j);

  IterationResult out;
  IterationReport& rep = out.report;
  const double slack = cfg.ordering_slack;
  Field d(g);
  for (int k = 0; k < cfg.max_outer; ++k) {
    const ResidualResult r = pde_residual(u, w);
    SolveResult step = sys.solve(r.field, zero, cfg.solver, &d);
    d = std::move(step.u);
    rep.inner_iterations += step.stats.iterations;
    double inc = 0.0;
    for (std::size_t m : mask) {
      u[m] += d[m];
      inc = std::max(inc, std::abs(d[m]));
      rep.monotone.record(-d[m] - slack);
      rep.confinement.record(std::max(-u[m], u[m] - 1.0) - slack);
      rep.subsolution.record(v0[m] - u[m] - slack);
    }
    if (k == 0) {
      rep.first_step_min = d[mask.front()];
      for (std::size_t m : mask) rep.first_step_min = std::min(rep.first_step_min, d[m]);
    }
    rep.increments.push_back(inc);
    rep.outer_iters = k + 1;
    if (cfg.throw_on_violation && !(rep.monotone.pass() && rep.confinement.pass() && rep.subsolution.pass()))
      throw OrderingError("monotone_iterate: ordering violated at outer iteration " + std::to_string(k + 1) +
                          " (solver or M misconfigured)");
    if (inc < cfg.it_tol) {
      rep.converged = true;
      break;
    }
  }
  if (!rep.converged)
    throw ConvergenceError("monotone_iterate: no convergence in " + std::to_string(cfg.max_outer) +
                               " outer iterations",
                           rep.increments.empty() ? 0.0 : rep.increments.back());
  out.u_tilde = std::move(u);
  return out;
}

struct FullSolution {
  Field v_R;
  double residual = 0.0;              ///< five-point residual on the full interior
  double consistency_residual = 0.0;  ///< fourth-order evaluation, O(h^2)
  double origin_residual = 0.0;
};

/// Odd reflection of the half-domain solution to Q_R.
inline FullSolution assemble_full_solution(const Field& u_tilde, const DoubleWell& w, double trace_tol = 1e-10) {
  FullSolution s;
  s.v_R = reflect_odd(u_tilde, trace_tol);
  const ResidualResult r = pde_residual(s.v_R, w);
  s.residual = r.interior_max;
  const Grid2D& fg = s.v_R.grid();
  s.origin_residual = std::abs(r.field(fg.center_col(), fg.zero_row()));
  s.consistency_residual = consistency_residual(s.v_R, w).interior_max;
  return s;
}

/// A posteriori check of the sliding-method hypothesis on vertical segments:
/// bottom value < u < top value at every interior node of each column.
inline OrderingStat vertical_segment_hypothesis(const Field& u) {
  const Grid2D& g = u.grid();
  OrderingStat st;
  for (int i = 1; i < g.nx() - 1; ++i) {
    const double lo = u(i, 0), hi = u(i, g.ny() - 1);
    for (int j = 1; j < g.ny() - 1; ++j) {
      const double v = u(i, j);
      if (!(lo < v && v < hi)) st.record(std::max({lo - v, v - hi, std::numeric_limits<double>::min()}));
    }
  }
  return st;
}

struct ConstructionConfig {
  double R = 12.0;
  int nx = 0;  ///< 0 selects 8R + 1 (hx = 1/4)
  int ny = 0;  ///< 0 selects R^2 / (2 hx) + 1 on Q_R^+ (hy = 2 hx)
  double a = 0.5;
  BoundaryProfile profile = BoundaryProfile::linear;
  bool relaxed_gate = false;
  Tolerances tol{};

  int resolved_nx() const {
    if (nx > 0) return nx;
    return 2 * int(std::llround(4.0 * R)) + 1;
  }
  int resolved_ny() const {
    if (ny > 0) return ny;
    const double hx = 2.0 * R / double(resolved_nx() - 1);
    int m = int(std::llround(R * R / (2.0 * hx)));
    if (m % 2 == 1) ++m;  // keep ny odd
    return m + 1;
  }
};

struct ConstructionOutcome {
  Grid2D grid;
  Subsolution sub;
  ReactionConstants rc{};
  IterationResult iter;
  FullSolution full;
  OrderingStat mono_hypothesis;
  double fixed_point_residual = 0.0;
  double pde_residual = 0.0;
};

/// Boundary data, subsolution, monotone iteration and odd reflection.
inline ConstructionOutcome construct(const ConstructionConfig& cfg, const DoubleWell& w) {
  require(cfg.R > 0.0, "construct: R must be positive");
  ConstructionOutcome out;
  out.grid = make_grid(cfg.R, cfg.resolved_nx(), cfg.resolved_ny(), DomainKind::upper);
  EigenConfig ecfg;
  ecfg.solver.rel_tol = cfg.tol.solver_rel_tol;
  ecfg.shift = cfg.tol.eigen_shift;
  ecfg.residual_tol = cfg.tol.eigen_residual;
  ecfg.rayleigh_rel = cfg.tol.rayleigh_rel;
  ecfg.max_iter = cfg.tol.eigen_max_iter;
  out.sub = build_subsolution(out.grid, w, cfg.a, cfg.relaxed_gate, ecfg);
  out.rc = reaction_constants(w, 0.0, 1.0, cfg.tol.lipschitz_margin);

  IterateConfig icfg;
  icfg.it_tol = cfg.tol.it_tol;
  icfg.max_outer = cfg.tol.max_outer;
  icfg.ordering_slack = cfg.tol.ordering_factor * cfg.tol.solver_rel_tol;
  icfg.solver.rel_tol = cfg.tol.solver_rel_tol;
  icfg.throw_on_violation = true;
  out.iter = monotone_iterate(out.grid, w, out.rc.M, out.sub.v0, boundary_profile(out.grid, cfg.profile), icfg);
  out.mono_hypothesis = vertical_segment_hypothesis(out.iter.u_tilde);
  out.full = assemble_full_solution(out.iter.u_tilde, w, cfg.tol.trace_tol);
  out.fixed_point_residual = out.full.residual;
  out.pde_residual = out.full.consistency_residual;
  return out;
}

inline nlohmann::ordered_json ordering_json(const OrderingStat& s) {
  return {{"count", s.count}, {"max", s.max_violation}, {"pass", s.pass()}};
}

/// Construction section of the report, with a fixed key set.
inline nlohmann::ordered_json construction_json(const ConstructionOutcome& o) {
  const IterationReport& r = o.iter.report;
  nlohmann::ordered_json j;
  j["R"] = o.grid.R();
  j["nx"] = o.grid.nx();
  j["ny"] = o.grid.ny();
  j["a"] = o.sub.ball.x0 - o.sub.rho;
  j["rho"] = o.sub.rho;
  j["lambda0"] = o.sub.lambda0;
  j["eps"] = o.sub.eps;
  j["M"] = o.rc.M;
  j["outer_iters"] = r.outer_iters;
  j["increments"] = r.increments;
  j["violations"] = {
      {"monotone", ordering_json(r.monotone)},
      {"confinement", ordering_json(r.confinement)},
      {"subsolution", ordering_json(r.subsolution)},
      {"mono_hypothesis", ordering_json(o.mono_hypothesis)},
      {"first_step_min", r.first_step_min},
      {"relaxed_gate_used", o.sub.relaxed_gate_used},
  };
  j["fixed_point_residual"] = o.fixed_point_residual;
  j["pde_residual"] = o.pde_residual;
  return j;
}

}  // namespace gac

#endif  // GAC_CONSTRUCTION_HPP
