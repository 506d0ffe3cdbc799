#ifndef GAC_ODE_HPP
#define GAC_ODE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "gac/errors.hpp"
#include "gac/grid.hpp"
#include "gac/potential.hpp"

namespace gac::ode {

/// Samples of h'' = W'(h) on a uniform time grid, with H = |h'|^2/2 - W(h).
struct OdeTrajectory {
  double dt = 0.0;
  std::vector<double> t, h, hp, H;
  bool truncated = false;  ///< left |h| <= escape_bound before t_span
  double drift = 0.0;      ///< max |H(t) - H(0)|
  double drift_constant = 0.0;  ///< drift / dt^2

  std::size_t size() const noexcept { return h.size(); }
};

inline constexpr double kEscapeBound = 10.0;

namespace detail {

// Velocity Verlet with signed step; time runs from 0 to t_span * sign(step).
inline OdeTrajectory leapfrog(const DoubleWell& w, double h0, double hp0, double t_span, double step) {
  const std::size_t n = std::size_t(std::llround(t_span / std::abs(step)));
  OdeTrajectory tr;
  tr.dt = std::abs(step);
  tr.t.reserve(n + 1);
  tr.h.reserve(n + 1);
  tr.hp.reserve(n + 1);
  double h = h0, p = hp0;
  tr.t.push_back(0.0);
  tr.h.push_back(h);
  tr.hp.push_back(p);
  for (std::size_t k = 1; k <= n; ++k) {
    p += 0.5 * step * w.dW(h);
    h += step * p;
    p += 0.5 * step * w.dW(h);
    if (!std::isfinite(h) || std::abs(h) > kEscapeBound) {
      tr.truncated = true;
      break;
    }
    tr.t.push_back(double(k) * step);
    tr.h.push_back(h);
    tr.hp.push_back(p);
  }
  tr.H.resize(tr.h.size());
  for (std::size_t k = 0; k < tr.h.size(); ++k) tr.H[k] = 0.5 * tr.hp[k] * tr.hp[k] - w.W(tr.h[k]);
  for (double e : tr.H) tr.drift = std::max(tr.drift, std::abs(e - tr.H[0]));
  tr.drift_constant = tr.drift / (step * step);
  return tr;
}

}  // namespace detail

/// Second-order symplectic (leapfrog) integration on [0, t_span].
inline OdeTrajectory integrate(const DoubleWell& w, double h0, double hp0, double t_span, double dt) {
  require(dt > 0.0 && dt <= 0.1, "ode::integrate: dt must lie in (0, 0.1]");
  require(t_span > 0.0, "ode::integrate: t_span must be positive");
  return detail::leapfrog(w, h0, hp0, t_span, dt);
}

/// Glue a backward run (time reversed) and a forward run from the same state
/// into one trajectory on [-t_span, t_span].
inline OdeTrajectory integrate_two_sided(const DoubleWell& w, double h0, double hp0, double t_span,
                                         double dt) {
  require(dt > 0.0 && dt <= 0.1, "ode::integrate_two_sided: dt must lie in (0, 0.1]");
  const OdeTrajectory fwd = detail::leapfrog(w, h0, hp0, t_span, dt);
  const OdeTrajectory bwd = detail::leapfrog(w, h0, hp0, t_span, -dt);
  OdeTrajectory tr;
  tr.dt = dt;
  tr.truncated = fwd.truncated || bwd.truncated;
  for (std::size_t k = bwd.size(); k-- > 1;) {
    tr.t.push_back(bwd.t[k]);
    tr.h.push_back(bwd.h[k]);
    tr.hp.push_back(bwd.hp[k]);
    tr.H.push_back(bwd.H[k]);
  }
  for (std::size_t k = 0; k < fwd.size(); ++k) {
    tr.t.push_back(fwd.t[k]);
    tr.h.push_back(fwd.h[k]);
    tr.hp.push_back(fwd.hp[k]);
    tr.H.push_back(fwd.H[k]);
  }
  for (double e : tr.H) tr.drift = std::max(tr.drift, std::abs(e - tr.H.front()));
  tr.drift_constant = tr.drift / (dt * dt);
  return tr;
}

/// Heteroclinic orbit through h(0) = 0 on at most [-t_span, t_span].
///
/// The energy-exact slope sqrt(2 W(0)) puts the continuous orbit on the
/// separatrix, but the discrete orbit sits O(dt^2) off it and leaves the
/// saddle at +-1 after a few time units. The initial slope is therefore
/// refined by bisection: too large overshoots +1, too small turns back.
inline OdeTrajectory heteroclinic(const DoubleWell& w, double t_span = 20.0, double dt = 1e-3) {
  require(dt > 0.0 && dt <= 0.1, "ode::heteroclinic: dt must lie in (0, 0.1]");
  const double p_exact = std::sqrt(2.0 * w.W(0.0));
  // +1 when the forward orbit overshoots h = 1, -1 when it turns back, 0 if undecided
  auto fate = [&](double p) {
    double h = 0.0, v = p;
    const std::size_t n = std::size_t(std::llround(t_span / dt));
    for (std::size_t k = 0; k < n; ++k) {
      v += 0.5 * dt * w.dW(h);
      h += dt * v;
      v += 0.5 * dt * w.dW(h);
      if (h > 1.0) return 1;
      if (v < 0.0) return -1;
    }
    return 0;
  };
  double lo = p_exact * (1.0 - 1e-3), hi = p_exact * (1.0 + 1e-3);
  require(fate(lo) < 0 && fate(hi) > 0, "ode::heteroclinic: shooting bracket does not straddle the separatrix");
  double p = p_exact;
  for (int it = 0; it < 200; ++it) {
    p = 0.5 * (lo + hi);
    if (p == lo || p == hi) break;
    const int f = fate(p);
    if (f == 0) break;
    (f > 0 ? hi : lo) = p;
  }
  // W is even, so the backward half is the mirror image -h(-t); the two-sided
  // run reproduces that with the same slope.
  OdeTrajectory tr = integrate_two_sided(w, 0.0, p, t_span, dt);
  // Rounding in p grows like exp(sqrt(W''(1)) |t|); for steep wells the tails
  // leave the saddles before |t| = t_span. Keep the monotone arc through
  // t = 0 that stays inside (-1, 1).
  const std::size_t mid = std::size_t(std::find(tr.t.begin(), tr.t.end(), 0.0) - tr.t.begin());
  auto on_arc = [&](std::size_t k) { return tr.hp[k] > 0.0 && std::abs(tr.h[k]) < 1.0; };
  std::size_t lo_k = mid, hi_k = mid;
  while (lo_k > 0 && on_arc(lo_k - 1)) --lo_k;
  while (hi_k + 1 < tr.size() && on_arc(hi_k + 1)) ++hi_k;
  if (lo_k > 0 || hi_k + 1 < tr.size()) {
    auto clip = [&](std::vector<double>& v) { v = std::vector<double>(v.begin() + lo_k, v.begin() + hi_k + 1); };
    clip(tr.t);
    clip(tr.h);
    clip(tr.hp);
    clip(tr.H);
    tr.truncated = false;
    tr.drift = 0.0;
    for (double e : tr.H) tr.drift = std::max(tr.drift, std::abs(e - tr.H.front()));
    tr.drift_constant = tr.drift / (dt * dt);
  }
  return tr;
}

enum class OrbitTag { constant, periodic, heteroclinic, unbounded };

inline const char* to_string(OrbitTag t) {
  switch (t) {
    case OrbitTag::constant: return "constant";
    case OrbitTag::periodic: return "periodic";
    case OrbitTag::heteroclinic: return "heteroclinic";
    case OrbitTag::unbounded: return "unbounded";
  }
  return "?";
}

struct CriticalPoint {
  double t;  ///< refined time of h' = 0
  double h;  ///< refined extremal value
};

struct OrbitClass {
  OrbitTag tag = OrbitTag::constant;
  bool provisional = false;
  double period = 0.0;  ///< 2T for periodic orbits
  std::vector<CriticalPoint> critical_points;
  double limit_start = 0.0, limit_end = 0.0;
};

/// Sign changes of h' refined by a parabola through the three samples around
/// the discrete extremum.
inline std::vector<CriticalPoint> critical_points(const OdeTrajectory& tr) {
  std::vector<CriticalPoint> out;
  const std::size_t n = tr.size();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const bool change = (tr.hp[k] > 0.0 && tr.hp[k + 1] <= 0.0) || (tr.hp[k] < 0.0 && tr.hp[k + 1] >= 0.0);
    if (!change) continue;
    const bool is_max = tr.hp[k] > 0.0;
    std::size_t m = ((tr.h[k + 1] > tr.h[k]) == is_max) ? k + 1 : k;
    if (m == 0 || m + 1 >= n) {
      out.push_back(CriticalPoint{tr.t[m], tr.h[m]});
      continue;
    }
    const double a = tr.h[m - 1], b = tr.h[m], c = tr.h[m + 1];
    const double denom = a - 2.0 * b + c;
    if (denom == 0.0) {
      out.push_back(CriticalPoint{tr.t[m], b});
      continue;
    }
    const double s = 0.5 * (a - c) / denom;  // vertex offset in units of dt
    const double hv = b - 0.25 * (a - c) * s;
    out.push_back(CriticalPoint{tr.t[m] + s * (tr.t[m + 1] - tr.t[m]), hv});
  }
  return out;
}

inline OrbitClass classify_orbit(const OdeTrajectory& tr) {
  require(tr.size() >= 2, "classify_orbit: trajectory needs at least two samples");
  OrbitClass oc;
  oc.limit_start = tr.h.front();
  oc.limit_end = tr.h.back();
  double max_hp = 0.0;
  for (double v : tr.hp) max_hp = std::max(max_hp, std::abs(v));
  if (tr.truncated) {
    oc.tag = OrbitTag::unbounded;
    return oc;
  }
  if (max_hp < 1e-10) {
    oc.tag = OrbitTag::constant;
    return oc;
  }
  oc.critical_points = critical_points(tr);
  if (oc.critical_points.size() >= 2) {
    oc.tag = OrbitTag::periodic;
    const auto& cp = oc.critical_points;
    oc.period = 2.0 * (cp.back().t - cp.front().t) / double(cp.size() - 1);
    return oc;
  }
  auto near_equilibrium = [](double h, double hp, double& which) {
    for (double e : {-1.0, 0.0, 1.0})
      if (std::abs(h - e) <= 1e-4 && std::abs(hp) <= 1e-4) {
        which = e;
        return true;
      }
    return false;
  };
  double e0 = 0.0, e1 = 0.0;
  if (oc.critical_points.empty() && near_equilibrium(tr.h.front(), tr.hp.front(), e0) &&
      near_equilibrium(tr.h.back(), tr.hp.back(), e1) && e0 != e1) {
    oc.tag = OrbitTag::heteroclinic;
    return oc;
  }
  // too short to decide: one turning point suggests an arc of a periodic
  // orbit, none suggests a piece of a heteroclinic
  oc.provisional = true;
  oc.tag = oc.critical_points.size() == 1 ? OrbitTag::periodic : OrbitTag::heteroclinic;
  return oc;
}

/// Integrates forward and backward from (c, 0) and returns
/// max |h(t0 + t) - h(t0 - t)|.
inline double symmetry_check(const DoubleWell& w, double c, double t_span = 20.0, double dt = 1e-3) {
  require(dt > 0.0 && dt <= 0.1, "symmetry_check: dt must lie in (0, 0.1]");
  const OdeTrajectory fwd = detail::leapfrog(w, c, 0.0, t_span, dt);
  const OdeTrajectory bwd = detail::leapfrog(w, c, 0.0, t_span, -dt);
  const std::size_t n = std::min(fwd.size(), bwd.size());
  double m = 0.0;
  for (std::size_t k = 0; k < n; ++k) m = std::max(m, std::abs(fwd.h[k] - bwd.h[k]));
  return m;
}

struct TrajectoryFunctionals {
  double sup_h = 0.0, inf_h = 0.0;
  double total_variation = 0.0;  ///< integral of |h'|
  double layer_energy = 0.0;     ///< integral of |h'|^2
  double interp_lhs = 0.0;       ///< max |h'|
  double interp_rhs = 0.0;       ///< 2 (max |h| + max |h''|)
  double max_abs_hpp = 0.0;
};

inline TrajectoryFunctionals trajectory_functionals(const DoubleWell& w, const OdeTrajectory& tr) {
  require(tr.size() >= 2, "trajectory_functionals: trajectory needs at least two samples");
  TrajectoryFunctionals f;
  f.sup_h = *std::max_element(tr.h.begin(), tr.h.end());
  f.inf_h = *std::min_element(tr.h.begin(), tr.h.end());
  double max_h = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    max_h = std::max(max_h, std::abs(tr.h[k]));
    f.interp_lhs = std::max(f.interp_lhs, std::abs(tr.hp[k]));
    f.max_abs_hpp = std::max(f.max_abs_hpp, std::abs(w.dW(tr.h[k])));
  }
  for (std::size_t k = 0; k + 1 < tr.size(); ++k) {
    const double dt = tr.t[k + 1] - tr.t[k];
    f.total_variation += 0.5 * dt * (std::abs(tr.hp[k]) + std::abs(tr.hp[k + 1]));
    f.layer_energy += 0.5 * dt * (tr.hp[k] * tr.hp[k] + tr.hp[k + 1] * tr.hp[k + 1]);
  }
  f.interp_rhs = 2.0 * (max_h + f.max_abs_hpp);
  return f;
}

struct SymmetryDefect {
  double sup_h = 0.0, inf_h = 0.0, defect = 0.0;
};

/// sup h + inf h for a bounded periodic orbit with |h| <= 1, using the
/// refined turning values.
inline SymmetryDefect bounded_orbit_symmetry(const OdeTrajectory& tr) {
  const OrbitClass oc = classify_orbit(tr);
  double max_h = 0.0;
  for (double v : tr.h) max_h = std::max(max_h, std::abs(v));
  require(max_h <= 1.0, "bounded_orbit_symmetry: orbit leaves [-1, 1]");
  if (oc.tag == OrbitTag::constant) return SymmetryDefect{tr.h[0], tr.h[0], std::abs(2.0 * tr.h[0])};
  require(oc.tag == OrbitTag::periodic && !oc.provisional,
          "bounded_orbit_symmetry: orbit is not (certifiably) periodic");
  SymmetryDefect d{*std::max_element(tr.h.begin(), tr.h.end()), *std::min_element(tr.h.begin(), tr.h.end()), 0.0};
  for (const CriticalPoint& c : oc.critical_points) {
    d.sup_h = std::max(d.sup_h, c.h);
    d.inf_h = std::min(d.inf_h, c.h);
  }
  d.defect = std::abs(d.sup_h + d.inf_h);
  return d;
}

struct SegmentVariation {
  std::size_t begin = 0, end = 0;  ///< sample range [begin, end] of a maximal monotone run
  double variation = 0.0;          ///< sum of |h_{k+1} - h_k| over the run
  double jump = 0.0;               ///< |h_end - h_begin|
};

/// Maximal monotone runs of the sampled orbit. On each run the discrete total
/// variation telescopes to the jump of h.
inline std::vector<SegmentVariation> monotone_segments(const OdeTrajectory& tr) {
  std::vector<SegmentVariation> out;
  const std::size_t n = tr.size();
  std::size_t k = 0;
  while (k + 1 < n) {
    std::size_t e = k;
    int dir = 0;
    while (e + 1 < n) {
      const double d = tr.h[e + 1] - tr.h[e];
      const int s = (d > 0.0) - (d < 0.0);
      if (dir == 0) dir = s;
      if (s != 0 && s != dir) break;
      ++e;
    }
    SegmentVariation sv{k, e, 0.0, std::abs(tr.h[e] - tr.h[k])};
    for (std::size_t m = k; m < e; ++m) sv.variation += std::abs(tr.h[m + 1] - tr.h[m]);
    out.push_back(sv);
    k = e;
  }
  return out;
}

/// Layer energy of the heteroclinic: the constant behind the translation
/// energy gate.
inline double heteroclinic_layer_energy(const DoubleWell& w, double t_span = 20.0, double dt = 1e-3) {
  return trajectory_functionals(w, heteroclinic(w, t_span, dt)).layer_energy;
}

/// Header `t,h,hp,H`.
inline void write_trajectory_csv(std::ostream& os, const OdeTrajectory& tr) {
  os << "t,h,hp,H\n";
  for (std::size_t k = 0; k < tr.size(); ++k)
    os << format_double(tr.t[k]) << ',' << format_double(tr.h[k]) << ',' << format_double(tr.hp[k]) << ','
       << format_double(tr.H[k]) << '\n';
}

}  // namespace gac::ode

#endif  // GAC_ODE_HPP
