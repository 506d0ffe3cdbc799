#ifndef GAC_CLI_HPP
#define GAC_CLI_HPP

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gac/construction.hpp"
#include "gac/errors.hpp"
#include "gac/grid.hpp"
#include "gac/grushin_operator.hpp"
#include "gac/linear_solver.hpp"
#include "gac/ode.hpp"
#include "gac/potential.hpp"
#include "gac/principal_eigen.hpp"
#include "gac/tolerances.hpp"
#include "gac/verification.hpp"

namespace gac::cli {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

enum ExitCode : int { kPass = 0, kUsage = 1, kAssertion = 2 };

struct RunConfig {
  std::string command;
  double R = 12.0;
  int nx = 0, ny = 0;
  double a = 0.5;
  std::string potential = "standard";
  double it_tol = 1e-8;
  double solver_tol = 1e-10;
  bool relaxed_gate = false;
  std::string out = ".";
  std::string in;
  std::vector<double> radii;  ///< eigen-sweep ball radii
  std::vector<double> Rs;     ///< energy-sweep domain sizes
  double box = 6.0;           ///< energy-sweep comparison window Q_box
};

/// "standard" or comma-separated coefficients of s^0, s^2, s^4, ...
inline DoubleWell parse_potential(const std::string& text) {
  if (text == "standard") return DoubleWell::standard();
  std::vector<double> c;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      c.push_back(std::stod(tok, &used));
      require(used == tok.size(), "");
    } catch (const std::exception&) {
      throw PreconditionError("--potential: cannot parse coefficient '" + tok + "'");
    }
  }
  require(c.size() >= 3, "--potential: need at least three even coefficients");
  return DoubleWell::from_even_coefficients(c);
}

inline Tolerances resolved_tolerances(const RunConfig& rc) {
  Tolerances t;
  t.it_tol = rc.it_tol;
  t.solver_rel_tol = rc.solver_tol;
  return t;
}

inline void validate(const RunConfig& rc) {
  require(rc.R > 0.0 && rc.R <= 64.0, "--R must lie in (0, 64]");
  require(rc.nx == 0 || (rc.nx >= 5 && rc.nx % 2 == 1), "--nx must be odd and >= 5");
  require(rc.ny == 0 || (rc.ny >= 5 && rc.ny % 2 == 1), "--ny must be odd and >= 5");
  require(rc.a > 0.0, "--a must be positive");
  require(rc.solver_tol >= 1e-14 && rc.solver_tol <= 1e-4, "--solver-tol must lie in [1e-14, 1e-4]");
  require(rc.it_tol >= 100.0 * rc.solver_tol * (1.0 - 1e-12) && rc.it_tol <= 1e-2,
          "--it-tol must lie in [100 x solver-tol, 1e-2]");
  require(rc.box > 0.0, "--box must be positive");
}

/// Parallel job cap from GAC_THREADS (default: hardware concurrency).
inline unsigned thread_cap() {
  const char* env = std::getenv("GAC_THREADS");
  if (env == nullptr || *env == '\0') return std::max(1u, std::thread::hardware_concurrency());
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  require(end != env && *end == '\0' && v >= 1 && v <= 1024, "GAC_THREADS must be an integer in [1, 1024]");
  return unsigned(v);
}

/// Runs job(0..n-1) on at most `cap` threads; results are stored by index.
inline void run_jobs(std::size_t n, unsigned cap, const std::function<void(std::size_t)>& job) {
  std::vector<std::exception_ptr> errors(n);
  for (std::size_t start = 0; start < n; start += cap) {
    std::vector<std::thread> pool;
    for (std::size_t k = start; k < std::min(n, start + cap); ++k)
      pool.emplace_back([&, k] {
        try {
          job(k);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    for (std::thread& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline json config_json(const RunConfig& rc, const DoubleWell& w) {
  const Tolerances tol = resolved_tolerances(rc);
  json j;
  j["command"] = rc.command;
  j["R"] = rc.R;
  j["nx"] = rc.nx;
  j["ny"] = rc.ny;
  j["a"] = rc.a;
  j["potential"] = {{"name", rc.potential}, {"even_coefficients", w.coefficients()}};
  j["relaxed_gate"] = rc.relaxed_gate;
  j["it_tol"] = rc.it_tol;
  j["solver_tol"] = rc.solver_tol;
  if (!rc.radii.empty()) j["radii"] = rc.radii;
  if (!rc.Rs.empty()) j["Rs"] = rc.Rs;
  if (rc.command == "energy-sweep") j["box"] = rc.box;
  j["tolerances"] = tol;
  return j;
}

inline void write_text(const fs::path& p, const std::string& s) {
  std::ofstream os(p, std::ios::binary);
  require(static_cast<bool>(os), "cannot write " + p.string());
  os << s;
}

inline void write_json(const fs::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

template <class Writer>
void write_csv(const fs::path& p, Writer&& wr) {
  std::ofstream os(p, std::ios::binary);
  require(static_cast<bool>(os), "cannot write " + p.string());
  wr(os);
}

inline fs::path prepare_out(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  require(!ec && fs::is_directory(p), "output directory '" + dir + "' is not writable");
  return p;
}

// --- construct / verify -----------------------------------------------------------

struct ConstructRun {
  ConstructionOutcome outcome;
  VerificationReport verification;
  json report;
  bool pass = false;
};

inline ConstructionConfig construction_config(const RunConfig& rc) {
  ConstructionConfig cc;
  cc.R = rc.R;
  cc.nx = rc.nx;
  cc.ny = rc.ny;
  cc.a = rc.a;
  cc.relaxed_gate = rc.relaxed_gate;
  cc.tol = resolved_tolerances(rc);
  return cc;
}

inline ConstructRun construct_and_verify(const RunConfig& rc, const DoubleWell& w) {
  ConstructRun run;
  const ConstructionConfig cc = construction_config(rc);
  run.outcome = construct(cc, w);
  VerifyConfig vc;
  vc.tol = cc.tol;
  vc.layer_energy = ode::heteroclinic_layer_energy(w);
  run.verification = verify_solution(run.outcome.full.v_R, w, vc);
  const IterationReport& ir = run.outcome.iter.report;
  const bool construction_ok =
      ir.converged && ir.monotone.pass() && ir.confinement.pass() && ir.subsolution.pass();
  run.pass = construction_ok && run.verification.pass();
  run.report["version"] = kVersion;
  run.report["config"] = config_json(rc, w);
  run.report["construction"] = construction_json(run.outcome);
  run.report["construction"]["pass"] = construction_ok;
  run.report["verification"] = to_json(run.verification);
  run.report["pass"] = run.pass;
  return run;
}

inline void write_verification_artifacts(const fs::path& dir, const VerificationReport& v) {
  write_csv(dir / "energy.csv", [&](std::ostream& os) { write_energy_csv(os, v.energy); });
  write_csv(dir / "score.csv", [&](std::ostream& os) { write_score_csv(os, v.score); });
}

inline int cmd_construct(const RunConfig& rc, std::ostream& out) {
  const DoubleWell w = parse_potential(rc.potential);
  const fs::path dir = prepare_out(rc.out);
  const ConstructRun run = construct_and_verify(rc, w);
  write_json(dir / "report.json", run.report);
  write_csv(dir / "field.csv", [&](std::ostream& os) { write_field_csv(os, run.outcome.full.v_R); });
  write_verification_artifacts(dir, run.verification);
  const VerificationReport& v = run.verification;
  out << "construct R=" << rc.R << " outer_iters=" << run.outcome.iter.report.outer_iters
      << " lambda0=" << run.outcome.sub.lambda0 << "\n"
      << "  monotonicity " << (v.mono.pass() ? "pass" : "FAIL") << " min_fd=" << v.mono.min_fd << "\n"
      << "  stability    " << (v.stab.pass() ? "pass" : "FAIL") << " lambda_min=" << v.stab.lambda_min << "\n"
      << "  energy F     " << (v.growth.pass_F() ? "pass" : "FAIL") << " slope=" << v.growth.F.slope << "\n"
      << "  energy W     " << (v.growth.pass_W() ? "pass" : "FAIL") << " slope=" << v.growth.Wgt.slope << "\n"
      << "  translation  " << (v.translation.pass() ? "pass" : "FAIL")
      << " min=" << v.translation.min_normalized << "\n"
      << "  1-D score    " << (v.pass_score() ? "pass" : "FAIL") << " ratio=" << v.score_ratio << "\n";
  return run.pass ? kPass : kAssertion;
}

inline int cmd_verify(const RunConfig& rc, std::ostream& out) {
  require(!rc.in.empty(), "verify: --in <field.csv> is required");
  const DoubleWell w = parse_potential(rc.potential);
  std::ifstream is(rc.in);
  require(static_cast<bool>(is), "verify: cannot open " + rc.in);
  Field u = read_field_csv(is);
  if (u.grid().kind() == DomainKind::upper) u = reflect_odd(u, resolved_tolerances(rc).trace_tol);
  const fs::path dir = prepare_out(rc.out);
  VerifyConfig vc;
  vc.tol = resolved_tolerances(rc);
  vc.layer_energy = ode::heteroclinic_layer_energy(w);
  const VerificationReport v = verify_solution(u, w, vc);
  json rep;
  rep["version"] = kVersion;
  rep["config"] = config_json(rc, w);
  rep["verification"] = to_json(v);
  rep["pass"] = v.pass();
  write_json(dir / "report.json", rep);
  write_verification_artifacts(dir, v);
  out << "verify " << (v.pass() ? "pass" : "FAIL") << "\n";
  return v.pass() ? kPass : kAssertion;
}

// --- ODE suite ------------------------------------------------------------------------

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
};

inline json checks_json(const std::vector<Check>& cs) {
  json a = json::array();
  for (const Check& c : cs)
    a.push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}});
  return a;
}

inline bool all_pass(const std::vector<Check>& cs) {
  return std::all_of(cs.begin(), cs.end(), [](const Check& c) { return c.pass; });
}

struct OdeSuite {
  std::vector<Check> checks;
  ode::OdeTrajectory heteroclinic, periodic, small;
};

inline OdeSuite ode_suite(const DoubleWell& w) {
  OdeSuite s;
  const double dt = 1e-3;
  auto& cs = s.checks;

  s.periodic = ode::integrate(w, 0.5, 0.0, 50.0, dt);
  cs.push_back({"hamiltonian_drift_t50", s.periodic.drift <= 1e-6, s.periodic.drift, 1e-6});

  s.heteroclinic = ode::heteroclinic(w, 20.0, dt);
  const ode::TrajectoryFunctionals hf = ode::trajectory_functionals(w, s.heteroclinic);
  if (w.is_standard()) {
    double err = 0.0;
    for (std::size_t k = 0; k < s.heteroclinic.size(); ++k)
      err = std::max(err, std::abs(s.heteroclinic.h[k] - std::tanh(s.heteroclinic.t[k] / std::numbers::sqrt2)));
    cs.push_back({"heteroclinic_vs_tanh", err <= 1e-4, err, 1e-4});
    const double layer = 2.0 * std::numbers::sqrt2 / 3.0;
    cs.push_back({"layer_energy", std::abs(hf.layer_energy - layer) <= 1e-4, hf.layer_energy, 1e-4});
  }
  cs.push_back({"total_variation", std::abs(hf.total_variation - 2.0) <= 1e-4 && hf.total_variation <= 4.0,
                hf.total_variation, 1e-4});

  const ode::SymmetryDefect sd = ode::bounded_orbit_symmetry(s.periodic);
  cs.push_back({"periodic_sup_plus_inf", sd.defect <= 1e-6, sd.defect, 1e-6});

  const double l = std::abs(w.d2W(0.0));
  const double T_lin = 2.0 * std::numbers::pi / std::sqrt(l);
  s.small = ode::integrate(w, 0.01, 0.0, 5.0 * T_lin, dt);
  const ode::OrbitClass oc = ode::classify_orbit(s.small);
  const double rel = std::abs(oc.period - T_lin) / T_lin;
  cs.push_back({"small_amplitude_period", oc.tag == ode::OrbitTag::periodic && rel <= 0.01, oc.period, 0.01});

  double worst = -1.0;
  for (const ode::OdeTrajectory* tr : {&s.heteroclinic, &s.periodic, &s.small}) {
    const ode::TrajectoryFunctionals f = ode::trajectory_functionals(w, *tr);
    worst = std::max(worst, f.interp_lhs - f.interp_rhs);
  }
  cs.push_back({"interpolation_inequality", worst <= 0.0, worst, 0.0});
  return s;
}

inline int cmd_ode_suite(const RunConfig& rc, std::ostream& out) {
  const DoubleWell w = parse_potential(rc.potential);
  const fs::path dir = prepare_out(rc.out);
  const OdeSuite s = ode_suite(w);
  write_csv(dir / "heteroclinic.csv", [&](std::ostream& os) { ode::write_trajectory_csv(os, s.heteroclinic); });
  write_csv(dir / "periodic.csv", [&](std::ostream& os) { ode::write_trajectory_csv(os, s.periodic); });
  json rep;
  rep["version"] = kVersion;
  rep["config"] = config_json(rc, w);
  rep["checks"] = checks_json(s.checks);
  rep["pass"] = all_pass(s.checks);
  write_json(dir / "report.json", rep);
  for (const Check& c : s.checks) out << (c.pass ? "pass " : "FAIL ") << c.name << " = " << c.value << "\n";
  return all_pass(s.checks) ? kPass : kAssertion;
}

// --- sweeps -------------------------------------------------------------------------

/// First zero of J_0 squared: the principal Dirichlet eigenvalue of the
/// Euclidean unit disk.
inline double unit_disk_lambda1() {
  double lo = 2.0, hi = 3.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (std::cyl_bessel_j(0.0, mid) > 0.0 ? lo : hi) = mid;
  }
  return lo * lo;
}

inline int cmd_eigen_sweep(const RunConfig& rc, std::ostream& out) {
  const DoubleWell w = parse_potential(rc.potential);
  const fs::path dir = prepare_out(rc.out);
  std::vector<double> radii = rc.radii.empty() ? std::vector<double>{2.0, 4.0, 8.0} : rc.radii;
  std::sort(radii.begin(), radii.end());
  for (double r : radii) require(r > 0.0, "eigen-sweep: radii must be positive");
  EigenConfig ec;
  ec.solver.rel_tol = rc.solver_tol;
  std::vector<ScalingRow> rows(radii.size());
  run_jobs(radii.size(), thread_cap(), [&](std::size_t k) {
    rows[k] = eigen_scaling_sweep(rc.a, {radii[k]}, ec).front();
    const fs::path sub = dir / ("rho_" + format_double(radii[k]));
    fs::create_directories(sub);
    write_json(sub / "eigen.json", {{"rho", rows[k].rho},
                                    {"lambda", rows[k].lambda},
                                    {"lambda_rho_sq", rows[k].lambda_rho_sq},
                                    {"nx", rows[k].nx},
                                    {"ny", rows[k].ny},
                                    {"mask_size", rows[k].mask_size}});
  });
  write_csv(dir / "eigen.csv", [&](std::ostream& os) { write_scaling_csv(os, rows); });
  const double bound = 10.0 * unit_disk_lambda1();
  std::vector<Check> cs;
  for (const ScalingRow& r : rows) {
    cs.push_back({"lambda_positive_rho_" + format_double(r.rho), r.lambda > 0.0, r.lambda, 0.0});
    cs.push_back({"scaling_bound_rho_" + format_double(r.rho), r.lambda_rho_sq <= bound, r.lambda_rho_sq, bound});
  }
  json rep;
  rep["version"] = kVersion;
  rep["config"] = config_json(rc, w);
  rep["unit_disk_lambda1"] = unit_disk_lambda1();
  rep["checks"] = checks_json(cs);
  rep["pass"] = all_pass(cs);
  write_json(dir / "report.json", rep);
  for (const Check& c : cs) out << (c.pass ? "pass " : "FAIL ") << c.name << " = " << c.value << "\n";
  return all_pass(cs) ? kPass : kAssertion;
}

struct SweepRun {
  double R = 0.0;
  Field restricted;
  std::vector<EnergyRow> energy;
  GrowthFit growth;
  double lambda0 = 0.0;
  bool relaxed_gate_used = false;
};

/// Constructs at each R, reports the energy growth of each solution and the
/// sup distance between consecutive solutions restricted to Q_box.
inline int cmd_energy_sweep(const RunConfig& rc, std::ostream& out) {
  const DoubleWell w = parse_potential(rc.potential);
  const fs::path dir = prepare_out(rc.out);
  std::vector<double> Rs = rc.Rs.empty() ? std::vector<double>{8.0, 12.0, 16.0} : rc.Rs;
  std::sort(Rs.begin(), Rs.end());
  for (double R : Rs) require(R >= rc.box, "energy-sweep: every R must be >= --box");
  std::vector<SweepRun> runs(Rs.size());
  run_jobs(Rs.size(), thread_cap(), [&](std::size_t k) {
    RunConfig sub = rc;
    sub.R = Rs[k];
    sub.command = "construct";
    ConstructionConfig cc = construction_config(sub);
    const ConstructionOutcome o = construct(cc, w);
    SweepRun& s = runs[k];
    s.R = Rs[k];
    s.restricted = restrict_to_box(o.full.v_R, rc.box);
    s.energy = energy_report(o.full.v_R, w, {s.R / 8.0, s.R / 6.0, s.R / 4.0, s.R / 2.0});
    s.growth = energy_growth_fit(s.energy, cc.tol.slope_F_max, cc.tol.slope_W_max);
    s.lambda0 = o.sub.lambda0;
    s.relaxed_gate_used = o.sub.relaxed_gate_used;
    const fs::path sd = dir / ("R_" + format_double(s.R));
    fs::create_directories(sd);
    write_csv(sd / "energy.csv", [&](std::ostream& os) { write_energy_csv(os, s.energy); });
    json j = construction_json(o);
    j["slope_F"] = s.growth.F.slope;
    j["slope_W"] = s.growth.Wgt.slope;
    write_json(sd / "report.json", j);
  });
  json table = json::array();
  std::vector<Check> cs;
  for (const SweepRun& s : runs) {
    table.push_back({{"R", s.R},
                     {"lambda0", s.lambda0},
                     {"relaxed_gate_used", s.relaxed_gate_used},
                     {"slope_F", s.growth.F.slope},
                     {"slope_W", s.growth.Wgt.slope},
                     {"pass_F", s.growth.pass_F()},
                     {"pass_W", s.growth.pass_W()}});
    cs.push_back({"slope_F_R_" + format_double(s.R), s.growth.pass_F(), s.growth.F.slope, s.growth.F_max});
    cs.push_back({"slope_W_R_" + format_double(s.R), s.growth.pass_W(), s.growth.Wgt.slope, s.growth.W_max});
  }
  json dist = json::array();
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < runs.size(); ++k) {
    require(runs[k].restricted.grid() == runs[k + 1].restricted.grid(),
            "energy-sweep: restrictions to Q_box live on different grids (set matching --nx/--ny spacing)");
    const double d = max_abs_difference(runs[k].restricted, runs[k + 1].restricted);
    dist.push_back({{"R_small", runs[k].R}, {"R_large", runs[k + 1].R}, {"sup_distance", d}});
    cs.push_back({"contraction_" + format_double(runs[k].R) + "_" + format_double(runs[k + 1].R), d < prev, d, prev});
    prev = d;
  }
  json rep;
  rep["version"] = kVersion;
  rep["config"] = config_json(rc, w);
  rep["runs"] = table;
  rep["restriction_distances"] = dist;
  rep["checks"] = checks_json(cs);
  rep["pass"] = all_pass(cs);
  write_json(dir / "report.json", rep);
  for (const Check& c : cs) out << (c.pass ? "pass " : "FAIL ") << c.name << " = " << c.value << "\n";
  return all_pass(cs) ? kPass : kAssertion;
}

// --- selftest --------------------------------------------------------------------------

inline std::vector<Check> selftest_checks() {
  std::vector<Check> cs;
  auto add = [&](const std::string& name, bool ok, double value = 0.0, double tol = 0.0) {
    cs.push_back({name, ok, value, tol});
  };
  const DoubleWell w = DoubleWell::standard();

  // potential
  add("W(1) = 0", w.W(1.0) == 0.0 && w.W(-1.0) == 0.0);
  add("W(0) = 1/4", w.W(0.0) == 0.25);
  add("W''(0) = -1, W''(1) = 2", w.d2W(0.0) == -1.0 && w.d2W(1.0) == 2.0);
  const ReactionConstants rcst = reaction_constants(w, 0.0, 1.0);
  add("M = 1.2 sup|W''| = 2.4", std::abs(rcst.M - 2.4) <= 1e-12, rcst.M, 1e-12);
  add("l = 1", rcst.l == 1.0);
  add("g(v) = -W'(v) + M v nondecreasing on [0, 1]", [&] {
    for (int k = 0; k < 1000; ++k)
      if (shifted_reaction(w, rcst.M, (k + 1) / 1000.0) < shifted_reaction(w, rcst.M, k / 1000.0)) return false;
    return true;
  }());

  // grid
  add("|(1, 0)|_G = 1", grushin_norm(1.0, 0.0) == 1.0);
  add("|(0, 1/2)|_G = 1", grushin_norm(0.0, 0.5) == 1.0);
  add("balls are open", !in_ball(GrushinBall{0.0, 0.0, 1.0}, 1.0, 0.0) && in_ball(GrushinBall{0.0, 0.0, 1.0}, 0.5, 0.0));

  // operator
  const Grid2D g = make_grid(2.0, 17, 17, DomainKind::full);
  auto lap_err = [&](auto u, auto lu) {
    const Field L = apply_laplacian(Field::sample(g, u));
    double e = 0.0;
    for (int j = 1; j < g.ny() - 1; ++j)
      for (int i = 1; i < g.nx() - 1; ++i) e = std::max(e, std::abs(L(i, j) - lu(g.x(i), g.y(j))));
    return e;
  };
  const double e1 = lap_err([](double x, double) { return x * x; }, [](double, double) { return 2.0; });
  const double e2 = lap_err([](double, double y) { return y * y; }, [](double x, double) { return 2.0 * x * x; });
  const double e3 = lap_err([](double x, double y) { return x * x * y; }, [](double, double y) { return 2.0 * y; });
  add("Delta_G exact on x^2, y^2, x^2 y", std::max({e1, e2, e3}) <= 1e-9, std::max({e1, e2, e3}), 1e-9);

  // linear solver: exact for quadratics
  {
    auto us = [](double x, double y) { return x * x + 0.5 * y * y + x * y; };
    const Field exact = Field::sample(g, us);
    const Field lap = apply_laplacian(exact);
    Field rhs(g);
    for (std::size_t k = 0; k < g.size(); ++k) rhs[k] = exact[k] - lap[k];
    const SolveResult r = solve_shifted_dirichlet(g, interior_mask(g), 1.0, rhs, exact, SolverConfig{1e-12, 0});
    const double err = max_abs_difference(r.u, exact);
    add("shifted solve reproduces a quadratic", err <= 1e-9, err, 1e-9);
  }

  // eigen
  {
    const Grid2D eg = scaling_grid(0.5, 2.0, 16);
    const EigenResult e = principal_eigenpair(eg, GrushinBall{2.5, 0.0, 2.0});
    add("lambda > 0", e.lambda > 0.0, e.lambda);
    double phimin = 1.0;
    for (std::size_t k : interior_ball_mask(eg, e.ball)) phimin = std::min(phimin, e.phi[k]);
    add("phi > 0 on the ball", phimin > 0.0, phimin);
  }

  // ode
  {
    const OdeSuite s = ode_suite(w);
    for (const Check& c : s.checks) cs.push_back(c);
  }

  // verification
  {
    const Grid2D vg = make_grid(4.0, 33, 65, DomainKind::full);
    const MonotonicityResult m1 = monotonicity_check(Field::sample(vg, [](double, double y) { return y; }));
    add("monotonicity of u = y is 1", std::abs(m1.min_fd - 1.0) <= 1e-12, m1.min_fd, 1e-12);
    const MonotonicityResult m2 = monotonicity_check(Field::sample(vg, [](double, double y) { return -y; }));
    add("monotonicity of u = -y fails", !m2.pass() && std::abs(m2.min_fd + 1.0) <= 1e-12, m2.min_fd);
    const MonotonicityResult m3 =
        monotonicity_check(Field::sample(vg, [](double, double y) { return std::tanh(y); }));
    add("monotonicity of tanh(y) passes", m3.pass(), m3.min_fd);

    const Field one(vg, 1.0);
    const std::vector<EnergyRow> e1r = energy_report(one, w, {1.0, 2.0, 4.0});
    add("F_r = 0 for u = 1", e1r[0].F == 0.0 && e1r[2].F == 0.0);
    add("u = 1 energy fit is flat", energy_growth_fit(e1r).F.flat);

    const StabilityResult st = stability_spectrum(one, w, centered_window(vg, 1.0, 1.0));
    add("stability of u = 1: lambda_min >= 2", st.lambda_min >= 2.0, st.lambda_min, 2.0);

    const Grid2D sg = make_grid(4.0, 129, 129, DomainKind::full);
    const OneDimScore s1 =
        one_dimensionality_score(Field::sample(sg, [](double x, double y) { return std::tanh(std::cos(std::numbers::pi / 8) * x + std::sin(std::numbers::pi / 8) * y); }));
    add("1-D field scores near 0", s1.score <= 1e-3, s1.score, 1e-3);
    const OneDimScore s2 =
        one_dimensionality_score(Field::sample(sg, [](double x, double y) { return std::tanh(x) * std::tanh(y); }));
    add("tanh(x) tanh(y) scores >= 0.05", s2.score >= 0.05, s2.score, 0.05);
    const OneDimScore s3 = one_dimensionality_score(Field(vg, 0.3));
    add("constant field flagged", s3.constant && s3.score == 0.0);

    const TranslationResult tr = translation_energy_check(
        Field::sample(vg, [](double x, double) { return std::tanh(x / std::numbers::sqrt2); }), w, 4.0,
        {0.0, vg.hy() * 4, vg.hy() * 8}, 3.0);
    add("y-independent field: E_R(t) = E_R(0)", std::abs(tr.min_normalized) <= 1e-12, tr.min_normalized, 1e-12);

    const VfDiagnostics vf1 = vf_diagnostics(Field::sample(vg, [](double x, double) { return std::tanh(x); }));
    add("[VF] bracket vanishes for u = u(x)", vf1.max_bracket == 0.0, vf1.max_bracket);
    const VfDiagnostics vf2 = vf_diagnostics(Field::sample(vg, [](double, double y) { return y; }));
    add("|grad_G y| vanishes on x = 0", vf2.min_grushin_grad == 0.0, vf2.min_grushin_grad);
  }

  // construction gate at small R
  {
    ConstructionConfig cc;
    cc.R = 2.0;
    bool gate = false;
    try {
      construct(cc, w);
    } catch (const GateError&) {
      gate = true;
    }
    add("R = 2 fails the lambda0 gate", gate);
  }
  return cs;
}

inline int cmd_selftest(const RunConfig& rc, std::ostream& out) {
  const fs::path dir = prepare_out(rc.out);
  const std::vector<Check> cs = selftest_checks();
  json rep;
  rep["version"] = kVersion;
  rep["config"] = config_json(rc, DoubleWell::standard());
  rep["checks"] = checks_json(cs);
  rep["pass"] = all_pass(cs);
  write_json(dir / "report.json", rep);
  for (const Check& c : cs) out << (c.pass ? "pass " : "FAIL ") << c.name << "\n";
  return all_pass(cs) ? kPass : kAssertion;
}

// --- dispatch ----------------------------------------------------------------------------

/// Parses argv, runs one subcommand, and maps failures to exit codes:
/// 0 all gated assertions pass, 2 an assertion failed, 1 usage or config error.
inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"Allen-Cahn solutions in the Grushin plane"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  RunConfig rc;

  auto add_common = [&](CLI::App* s) {
    s->add_option("--R", rc.R, "half-width of Q_R = [-R, R] x [-R^2, R^2]");
    s->add_option("--nx", rc.nx, "nodes in x (odd; 0 = 8R + 1)");
    s->add_option("--ny", rc.ny, "nodes in y on Q_R^+ (odd; 0 = hy = 2 hx)");
    s->add_option("--a", rc.a, "distance of the subsolution ball from x = 0");
    s->add_option("--it-tol", rc.it_tol, "outer iteration sup-increment tolerance");
    s->add_option("--solver-tol", rc.solver_tol, "linear solver relative residual tolerance");
    s->add_flag("--relaxed-gate", rc.relaxed_gate, "accept lambda0 < l instead of lambda0 <= l/2");
    s->add_option("--out", rc.out, "output directory");
    s->add_option("--potential", rc.potential, "'standard' or even coefficients c0,c2,c4,...");
  };
  CLI::App* c_construct = app.add_subcommand("construct", "build v_R on Q_R and verify it");
  CLI::App* c_verify = app.add_subcommand("verify", "verify a field CSV");
  CLI::App* c_ode = app.add_subcommand("ode-suite", "one-dimensional ODE checks");
  CLI::App* c_eigen = app.add_subcommand("eigen-sweep", "principal eigenvalue scaling");
  CLI::App* c_energy = app.add_subcommand("energy-sweep", "energy growth and restriction distances over R");
  CLI::App* c_self = app.add_subcommand("selftest", "built-in example checks");
  for (CLI::App* s : {c_construct, c_verify, c_ode, c_eigen, c_energy, c_self}) add_common(s);
  c_verify->add_option("--in", rc.in, "field CSV (x,y,value)")->required();
  c_eigen->add_option("--radii", rc.radii, "ball radii")->delimiter(',');
  c_energy->add_option("--Rs", rc.Rs, "domain sizes")->delimiter(',');
  c_energy->add_option("--box", rc.box, "comparison window Q_box");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kUsage;
  }
  CLI::App* sub = app.get_subcommands().front();
  rc.command = sub->get_name();
  try {
    validate(rc);
    if (sub == c_construct) return cmd_construct(rc, out);
    if (sub == c_verify) return cmd_verify(rc, out);
    if (sub == c_ode) return cmd_ode_suite(rc, out);
    if (sub == c_eigen) return cmd_eigen_sweep(rc, out);
    if (sub == c_energy) return cmd_energy_sweep(rc, out);
    return cmd_selftest(rc, out);
  } catch (const GateError& e) {
    err << e.what() << "\n";
    return kUsage;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConvergenceError& e) {
    err << "assertion failed: " << e.what() << "\n";
    return kAssertion;
  } catch (const OrderingError& e) {
    err << "assertion failed: " << e.what() << "\n";
    return kAssertion;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace gac::cli

#endif  // GAC_CLI_HPP
