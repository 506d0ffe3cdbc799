#ifndef GAC_VERIFICATION_HPP
#define GAC_VERIFICATION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <ostream>
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

// --- monotonicity in y ------------------------------------------------------

struct MonotonicityResult {
  double min_fd = 0.0;
  int i = 0, j = 0;  ///< location of the minimum (lower node of the pair)
  bool pass() const noexcept { return min_fd > 0.0; }
};

/// min of (u(i, j+1) - u(i, j)) / hy over interior columns and all vertical
/// edges.
inline MonotonicityResult monotonicity_check(const Field& u) {
  const Grid2D& g = u.grid();
  require(g.nx() >= 3 && g.ny() >= 2, "monotonicity_check: grid too small");
  MonotonicityResult r{std::numeric_limits<double>::infinity(), 0, 0};
  for (int j = 0; j + 1 < g.ny(); ++j)
    for (int i = 1; i < g.nx() - 1; ++i) {
      const double d = (u(i, j + 1) - u(i, j)) / g.hy();
      if (d < r.min_fd) r = {d, i, j};
    }
  return r;
}

// --- stability ----------------------------------------------------------------

struct StabilityConfig {
  SolverConfig solver{};
  double residual_tol = 1e-6;   ///< absolute, on the sup-normalized eigenvector
  double rayleigh_rel = 1e-10;
  double floor = -1e-6;
  int max_iter = 5000;
};

struct StabilityResult {
  double lambda_min = 0.0;
  double residual = 0.0;
  double shift = 0.0;
  int iterations = 0;
  std::size_t unknowns = 0;
  NodeWindow window;
  double floor = -1e-6;
  bool pass() const noexcept { return lambda_min >= floor * (1.0 + std::abs(lambda_min)); }
};

/// Smallest Dirichlet eigenvalue of -Delta_G + W''(u) on the nodes strictly
/// inside `window`, by inverse iteration on the operator shifted by
/// s = 1 + max(0, -min W''(u)).
inline StabilityResult stability_spectrum(const Field& u, const DoubleWell& w, const NodeWindow& window,
                                          const StabilityConfig& cfg = {}) {
  const Grid2D& g = u.grid();
  require(window.i0 >= 0 && window.j0 >= 0 && window.i1 <= g.nx() - 1 && window.j1 <= g.ny() - 1,
          "stability_spectrum: window exceeds the grid");
  require(window.nx() >= 3 && window.ny() >= 3, "stability_spectrum: window has no interior nodes");
  std::vector<std::size_t> mask;
  for (int j = window.j0 + 1; j < window.j1; ++j)
    for (int i = window.i0 + 1; i < window.i1; ++i) mask.push_back(g.index(i, j));
  double min_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t k : mask) min_d2 = std::min(min_d2, w.d2W(u[k]));
  const double s = 1.0 + std::max(0.0, -min_d2);
  std::vector<double> shift(mask.size());
  for (std::size_t k = 0; k < mask.size(); ++k) shift[k] = w.d2W(u[mask[k]]) + s;

  const DirichletSystem sys(g, mask, std::move(shift));
  InversePowerOptions opt;
  opt.rayleigh_rel = cfg.rayleigh_rel;
  opt.residual_tol = cfg.residual_tol;
  opt.residual_relative = false;
  opt.offset = s;
  opt.max_iter = cfg.max_iter;
  const InversePowerResult ip = inverse_power(sys, cfg.solver, opt);

  StabilityResult r;
  r.lambda_min = ip.mu - s;
  r.residual = ip.residual;
  r.shift = s;
  r.iterations = ip.iterations;
  r.unknowns = mask.size();
  r.window = window;
  r.floor = cfg.floor;
  return r;
}

// --- energies -----------------------------------------------------------------

/// |grad_G u|^2 / 2 + W(u) at every node.
inline Field energy_density(const Field& u, const DoubleWell& w) {
  Field e = gradient_sq(u);
  for (std::size_t k = 0; k < e.size(); ++k) e[k] = 0.5 * e[k] + w.W(u[k]);
  return e;
}

/// x^2 |grad_G u|^2 at every node.
inline Field weighted_density(const Field& u) {
  const Grid2D& g = u.grid();
  Field e = gradient_sq(u);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) e(i, j) *= g.x(i) * g.x(i);
  return e;
}

inline bool ball_within_grid(const Grid2D& g, double r) {
  const double tol = 1e-12 * (1.0 + r * r);
  return r <= g.R() + tol && 0.5 * r * r <= g.ymax() + tol && -0.5 * r * r >= g.ymin() - tol;
}

struct EnergyRow {
  double r = 0.0;
  double F = 0.0;
  double Wgt = 0.0;
  std::size_t nodes = 0;
};

/// F_r and the weighted energy over the Grushin balls B_r(0).
inline std::vector<EnergyRow> energy_report(const Field& u, const DoubleWell& w, std::vector<double> radii) {
  const Grid2D& g = u.grid();
  require(!radii.empty(), "energy_report: no radii");
  std::sort(radii.begin(), radii.end());
  for (double r : radii)
    require(r > 0.0 && ball_within_grid(g, r),
            "energy_report: ball of radius " + format_double(r) + " exceeds the grid");
  const Field e = energy_density(u, w);
  const Field q = weighted_density(u);
  std::vector<EnergyRow> rows;
  for (double r : radii) {
    const std::vector<std::size_t> m = ball_mask(g, GrushinBall{0.0, 0.0, r});
    rows.push_back(EnergyRow{r, integrate_over(e, m), integrate_over(q, m), m.size()});
  }
  return rows;
}

struct SlopeFit {
  double slope = 0.0;
  double stderr_ = 0.0;  ///< standard error of the slope (0 for two points)
  bool flat = false;     ///< a nonpositive energy made the fit degenerate
};

inline SlopeFit loglog_slope(const std::vector<double>& r, const std::vector<double>& v) {
  SlopeFit f;
  for (double e : v)
    if (!(e > 0.0)) {
      f.flat = true;
      return f;
    }
  const std::size_t n = r.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += std::log(r[k]);
    my += std::log(v[k]);
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dx = std::log(r[k]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(v[k]) - my);
  }
  f.slope = sxy / sxx;
  if (n > 2) {
    double sse = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double e = std::log(v[k]) - (my + f.slope * (std::log(r[k]) - mx));
      sse += e * e;
    }
    f.stderr_ = std::sqrt(sse / double(n - 2) / sxx);
  }
  return f;
}

struct GrowthFit {
  SlopeFit F, Wgt;
  double F_max = 2.3, W_max = 4.3;
  bool pass_F() const noexcept { return F.flat || F.slope <= F_max; }
  bool pass_W() const noexcept { return Wgt.flat || Wgt.slope <= W_max; }
};

/// Least-squares slopes of log F_r and log W_r against log r.
inline GrowthFit energy_growth_fit(const std::vector<EnergyRow>& table, double F_max = 2.3, double W_max = 4.3) {
  require(table.size() >= 3, "energy_growth_fit: need at least 3 radii");
  std::vector<double> r, F, Wg;
  for (const EnergyRow& row : table) {
    r.push_back(row.r);
    F.push_back(row.F);
    Wg.push_back(row.Wgt);
  }
  const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
  require(*hi >= 4.0 * *lo * (1.0 - 1e-12), "energy_growth_fit: radii must span a factor >= 4");
  GrowthFit g;
  g.F = loglog_slope(r, F);
  g.Wgt = loglog_slope(r, Wg);
  g.F_max = F_max;
  g.W_max = W_max;
  return g;
}

// --- translation energy ---------------------------------------------------------

struct TranslationRow {
  double t = 0.0;
  double E = 0.0;
  double diff = 0.0;        ///< E_R(t) - E_R(0)
  double normalized = 0.0;  ///< diff / R^2
};

struct TranslationResult {
  double R = 0.0;
  double E0 = 0.0;
  std::vector<TranslationRow> rows;
  double min_normalized = 0.0;
  double C_gate = 0.0;
  bool pass() const noexcept { return min_normalized >= -C_gate; }
};

/// E_R(t) = F_R of u(., . + t). Shifts must be multiples of hy, and the shifted
/// ball must stay inside the grid.
inline TranslationResult translation_energy_check(const Field& u, const DoubleWell& w, double R,
                                                  const std::vector<double>& shifts, double C_gate) {
  const Grid2D& g = u.grid();
  require(R > 0.0 && R <= g.R() * (1.0 + 1e-12), "translation_energy_check: R exceeds the grid");
  const Field e = energy_density(u, w);
  const std::vector<std::size_t> m = ball_mask(g, GrushinBall{0.0, 0.0, R});
  require(!m.empty(), "translation_energy_check: empty ball");
  int jmin = g.ny(), jmax = -1;
  for (std::size_t k : m) {
    jmin = std::min(jmin, g.row(k));
    jmax = std::max(jmax, g.row(k));
  }
  auto energy_at = [&](int s) {
    double acc = 0.0;
    for (std::size_t k : m) {
      const int i = g.col(k), j = g.row(k) + s;
      acc += g.quadrature_weight(g.col(k), g.row(k)) * e(i, j);
    }
    return acc * g.hx() * g.hy();
  };

  TranslationResult out;
  out.R = R;
  out.C_gate = C_gate;
  out.E0 = energy_at(0);
  out.min_normalized = 0.0;
  for (double t : shifts) {
    const double q = t / g.hy();
    const long long s = std::llround(q);
    require(std::abs(q - double(s)) <= 1e-9 * (1.0 + std::abs(q)),
            "translation_energy_check: shift " + format_double(t) + " is not a multiple of hy");
    require(jmin + s >= 0 && jmax + s <= g.ny() - 1,
            "translation_energy_check: shift " + format_double(t) + " exceeds the grid margin");
    TranslationRow row;
    row.t = t;
    row.E = energy_at(int(s));
    row.diff = row.E - out.E0;
    row.normalized = row.diff / (R * R);
    out.min_normalized = std::min(out.min_normalized, row.normalized);
    out.rows.push_back(row);
  }
  return out;
}

// --- one-dimensionality -----------------------------------------------------------

struct AngleResidual {
  double theta = 0.0;
  double residual = 0.0;
};

struct OneDimScore {
  double score = 0.0;
  double best_angle = 0.0;
  bool constant = false;
  std::vector<AngleResidual> per_angle;
};

namespace detail {

struct Binning {
  std::vector<int> bin;  ///< per node
  int nbins = 0;
};

inline Binning bin_nodes(const Grid2D& g, double a, double b) {
  const std::size_t n = g.size();
  std::vector<double> t(n);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) t[g.index(i, j)] = a * g.x(i) + b * g.y(j);
  const auto [lo, hi] = std::minmax_element(t.begin(), t.end());
  Binning out;
  out.nbins = int(std::ceil(std::sqrt(double(n))));
  out.bin.resize(n);
  const double tmin = *lo, span = *hi - *lo;
  for (std::size_t k = 0; k < n; ++k) {
    const int bk = span > 0.0 ? int((t[k] - tmin) / span * out.nbins) : 0;
    out.bin[k] = std::min(bk, out.nbins - 1);
  }
  return out;
}

inline double direction_t(const Grid2D& g, std::size_t k, double a, double b) {
  return a * g.x(g.col(k)) + b * g.y(g.row(k));
}

}  // namespace detail

/// Best-direction residual of the ansatz u = g(a x + b y): within-bin variance
/// over total variance, minimized over theta_k = k pi / n_angles.
inline OneDimScore one_dimensionality_score(const Field& u, int n_angles = 16) {
  require(n_angles >= 16, "one_dimensionality_score: need n_angles >= 16");
  const Grid2D& g = u.grid();
  const std::size_t n = g.size();
  double mean = 0.0;
  for (double v : u.values()) mean += v;
  mean /= double(n);
  double total = 0.0;
  for (double v : u.values()) total += (v - mean) * (v - mean);
  const bool constant =
      std::all_of(u.values().begin(), u.values().end(), [&](double v) { return v == u.values().front(); });

  OneDimScore out;
  if (constant || !(total > 0.0)) {
    out.constant = true;
    for (int k = 0; k < n_angles; ++k) out.per_angle.push_back({std::numbers::pi * k / n_angles, 0.0});
    return out;
  }
  out.score = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_angles; ++k) {
    const double th = std::numbers::pi * k / n_angles;
    const detail::Binning bn = detail::bin_nodes(g, std::cos(th), std::sin(th));
    std::vector<double> cnt(bn.nbins, 0.0), s1(bn.nbins, 0.0);
    for (std::size_t m = 0; m < n; ++m) {
      cnt[bn.bin[m]] += 1.0;
      s1[bn.bin[m]] += u[m];
    }
    double within = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      const double d = u[m] - s1[bn.bin[m]] / cnt[bn.bin[m]];
      within += d * d;
    }
    const double res = within / total;
    out.per_angle.push_back({th, res});
    if (res < out.score) {
      out.score = res;
      out.best_angle = th;
    }
  }
  return out;
}

/// Synthetic one-dimensional field on the grid of `u`: the bin means of u
/// along `theta`, interpolated linearly in t = x cos(theta) + y sin(theta).
inline Field one_dimensional_reference(const Field& u, double theta) {
  const Grid2D& g = u.grid();
  const double a = std::cos(theta), b = std::sin(theta);
  const detail::Binning bn = detail::bin_nodes(g, a, b);
  std::vector<double> cnt(bn.nbins, 0.0), su(bn.nbins, 0.0), st(bn.nbins, 0.0);
  for (std::size_t m = 0; m < g.size(); ++m) {
    cnt[bn.bin[m]] += 1.0;
    su[bn.bin[m]] += u[m];
    st[bn.bin[m]] += detail::direction_t(g, m, a, b);
  }
  std::vector<double> tc, gc;
  for (int k = 0; k < bn.nbins; ++k)
    if (cnt[k] > 0.0) {
      tc.push_back(st[k] / cnt[k]);
      gc.push_back(su[k] / cnt[k]);
    }
  Field out(g);
  for (std::size_t m = 0; m < g.size(); ++m) {
    const double t = detail::direction_t(g, m, a, b);
    if (t <= tc.front()) {
      out[m] = gc.front();
    } else if (t >= tc.back()) {
      out[m] = gc.back();
    } else {
      const std::size_t hi = std::size_t(std::upper_bound(tc.begin(), tc.end(), t) - tc.begin());
      const std::size_t lo = hi - 1;
      const double s = (t - tc[lo]) / (tc[hi] - tc[lo]);
      out[m] = gc[lo] + s * (gc[hi] - gc[lo]);
    }
  }
  return out;
}

// --- [VF] hypothesis diagnostics ------------------------------------------------------

struct VfDiagnostics {
  double max_bracket = 0.0;
  double min_grushin_grad = 0.0;
};

/// Interior max of x u_yy u_x - x u_xy u_y and interior min of |grad_G u|.
inline VfDiagnostics vf_diagnostics(const Field& u) {
  const Grid2D& g = u.grid();
  require(g.nx() >= 3 && g.ny() >= 3, "vf_diagnostics: grid too small");
  const double hx = g.hx(), hy = g.hy();
  VfDiagnostics d{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (int j = 1; j < g.ny() - 1; ++j)
    for (int i = 1; i < g.nx() - 1; ++i) {
      const double x = g.x(i);
      const double ux = (u(i + 1, j) - u(i - 1, j)) / (2.0 * hx);
      const double uy = (u(i, j + 1) - u(i, j - 1)) / (2.0 * hy);
      const double uyy = (u(i, j + 1) - 2.0 * u(i, j) + u(i, j - 1)) / (hy * hy);
      const double uxy = (u(i + 1, j + 1) - u(i + 1, j - 1) - u(i - 1, j + 1) + u(i - 1, j - 1)) / (4.0 * hx * hy);
      d.max_bracket = std::max(d.max_bracket, x * uyy * ux - uxy * x * uy);
      d.min_grushin_grad = std::min(d.min_grushin_grad, std::sqrt(ux * ux + x * x * uy * uy));
    }
  return d;
}

// --- report ------------------------------------------------------------------------

struct VerifyConfig {
  Tolerances tol{};
  std::vector<double> radii;            ///< empty selects {R/8, R/6, R/4, R/2}
  std::vector<double> shifts;           ///< empty selects multiples of hy up to R^2/4
  double stability_half_width = 0.0;    ///< 0 selects the whole grid
  double layer_energy = 2.0 * std::numbers::sqrt2 / 3.0;
};

struct VerificationReport {
  MonotonicityResult mono;
  StabilityResult stab;
  std::vector<EnergyRow> energy;
  GrowthFit growth;
  TranslationResult translation;
  OneDimScore score;
  OneDimScore reference_score;
  double score_ratio = 0.0;
  double score_ratio_min = 100.0;
  VfDiagnostics vf;
  bool pass_score() const noexcept { return !score.constant && score.score >= score_ratio_min * reference_score.score; }
  bool pass() const noexcept {
    return mono.pass() && stab.pass() && growth.pass_F() && growth.pass_W() && translation.pass() && pass_score();
  }
};

/// Default shifts: 8 equal steps up to R^2/4, rounded to multiples of hy.
inline std::vector<double> default_shifts(const Grid2D& g, double R) {
  std::vector<double> out;
  const long long top = std::llround(0.25 * R * R / g.hy());
  for (int k = 1; k <= 8; ++k) {
    const long long s = (top * k) / 8;
    if (s > 0 && (out.empty() || double(s) * g.hy() != out.back())) out.push_back(double(s) * g.hy());
  }
  return out;
}

/// All checks on a full-domain field v_R on Q_R.
inline VerificationReport verify_solution(const Field& v, const DoubleWell& w, const VerifyConfig& cfg = {}) {
  const Grid2D& g = v.grid();
  require(g.kind() == DomainKind::full, "verify_solution: expected a full-domain field");
  const double R = g.R();
  const Tolerances& tol = cfg.tol;
  VerificationReport rep;
  rep.mono = monotonicity_check(v);

  StabilityConfig sc;
  sc.solver.rel_tol = tol.solver_rel_tol;
  sc.residual_tol = tol.stability_residual;
  sc.rayleigh_rel = tol.rayleigh_rel;
  sc.floor = tol.stability_floor;
  sc.max_iter = tol.stability_max_iter;
  const double hw = cfg.stability_half_width > 0.0 ? cfg.stability_half_width : R;
  const NodeWindow win = centered_window(g, hw, hw * hw);
  rep.stab = stability_spectrum(v, w, win, sc);

  const std::vector<double> radii =
      cfg.radii.empty() ? std::vector<double>{R / 8.0, R / 6.0, R / 4.0, R / 2.0} : cfg.radii;
  rep.energy = energy_report(v, w, radii);
  rep.growth = energy_growth_fit(rep.energy, tol.slope_F_max, tol.slope_W_max);

  const std::vector<double> shifts = cfg.shifts.empty() ? default_shifts(g, R) : cfg.shifts;
  rep.translation = translation_energy_check(v, w, R, shifts,
                                             tol.c_gate_factor * cfg.layer_energy);

  rep.score = one_dimensionality_score(v, tol.score_angles);
  rep.reference_score = one_dimensionality_score(one_dimensional_reference(v, rep.score.best_angle), tol.score_angles);
  rep.score_ratio = rep.reference_score.score > 0.0 ? rep.score.score / rep.reference_score.score
                                                    : std::numeric_limits<double>::infinity();
  rep.score_ratio_min = tol.score_ratio_min;
  rep.vf = vf_diagnostics(v);
  return rep;
}

inline nlohmann::ordered_json to_json(const VerificationReport& r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["monotonicity"] = {{"min_fd", r.mono.min_fd},
                       {"at", {{"i", r.mono.i}, {"j", r.mono.j}}},
                       {"tolerance", 0.0},
                       {"pass", r.mono.pass()}};
  j["stability"] = {{"lambda_min", r.stab.lambda_min},
                    {"residual", r.stab.residual},
                    {"shift", r.stab.shift},
                    {"iterations", r.stab.iterations},
                    {"unknowns", r.stab.unknowns},
                    {"window", {r.stab.window.i0, r.stab.window.i1, r.stab.window.j0, r.stab.window.j1}},
                    {"tolerance", r.stab.floor},
                    {"pass", r.stab.pass()}};
  ordered_json table = ordered_json::array();
  for (const EnergyRow& e : r.energy) table.push_back({{"r", e.r}, {"F", e.F}, {"Wgt", e.Wgt}, {"nodes", e.nodes}});
  j["energy"] = {{"table", table},
                 {"slope_F", r.growth.F.slope},
                 {"slope_F_stderr", r.growth.F.stderr_},
                 {"slope_F_flat", r.growth.F.flat},
                 {"slope_F_max", r.growth.F_max},
                 {"pass_F", r.growth.pass_F()},
                 {"slope_W", r.growth.Wgt.slope},
                 {"slope_W_stderr", r.growth.Wgt.stderr_},
                 {"slope_W_flat", r.growth.Wgt.flat},
                 {"slope_W_max", r.growth.W_max},
                 {"pass_W", r.growth.pass_W()}};
  ordered_json trows = ordered_json::array();
  for (const TranslationRow& t : r.translation.rows)
    trows.push_back({{"t", t.t}, {"E", t.E}, {"diff", t.diff}, {"normalized", t.normalized}});
  j["translation"] = {{"R", r.translation.R},
                      {"E0", r.translation.E0},
                      {"table", trows},
                      {"min_normalized", r.translation.min_normalized},
                      {"C_gate", r.translation.C_gate},
                      {"pass", r.translation.pass()}};
  j["one_dimensionality"] = {{"score", r.score.score},
                             {"best_angle", r.score.best_angle},
                             {"constant", r.score.constant},
                             {"reference_score", r.reference_score.score},
                             {"ratio", r.score_ratio},
                             {"ratio_min", r.score_ratio_min},
                             {"pass", r.pass_score()}};
  j["vf_diagnostics"] = {{"max_bracket", r.vf.max_bracket}, {"min_grushin_grad", r.vf.min_grushin_grad}};
  j["pass"] = r.pass();
  return j;
}

// --- CSV artifacts -------------------------------------------------------------

inline void write_energy_csv(std::ostream& os, const std::vector<EnergyRow>& rows) {
  os << "r,F,Wgt\n";
  for (const EnergyRow& e : rows) os << format_double(e.r) << ',' << format_double(e.F) << ',' << format_double(e.Wgt) << '\n';
}

inline void write_score_csv(std::ostream& os, const OneDimScore& s) {
  os << "theta,residual\n";
  for (const AngleResidual& a : s.per_angle) os << format_double(a.theta) << ',' << format_double(a.residual) << '\n';
}

inline void write_scaling_csv(std::ostream& os, const std::vector<ScalingRow>& rows) {
  os << "rho,lambda,lambda_rho_sq\n";
  for (const ScalingRow& r : rows)
    os << format_double(r.rho) << ',' << format_double(r.lambda) << ',' << format_double(r.lambda_rho_sq) << '\n';
}

}  // namespace gac

#endif  // GAC_VERIFICATION_HPP
