#ifndef GAC_TOLERANCES_HPP
#define GAC_TOLERANCES_HPP

#include <json.hpp>

namespace gac {

inline constexpr const char* kVersion = "1.0.0";

/// Every pass/fail threshold used by the pipeline, in one place. Reports echo
/// this block verbatim.
struct Tolerances {
  // linear solver and outer iteration
  double solver_rel_tol = 1e-10;
  double it_tol = 1e-8;
  int max_outer = 500;
  double ordering_factor = 10.0;  // ordering slack = factor * solver_rel_tol
  double trace_tol = 1e-10;       // |u(x,0)| allowed before odd reflection

  // principal eigenpairs
  double eigen_shift = 1e-8;
  double eigen_residual = 1e-6;  // relative to lambda
  double rayleigh_rel = 1e-10;
  int eigen_max_iter = 2000;

  // verification gates
  double stability_floor = -1e-6;
  double stability_residual = 1e-6;
  int stability_max_iter = 5000;
  double slope_F_max = 2.3;
  double slope_W_max = 4.3;
  double c_gate_factor = 3.0;  // C_gate = factor * heteroclinic layer energy
  double score_ratio_min = 100.0;
  int score_angles = 16;

  // reaction constants
  double lipschitz_margin = 1.2;
};

inline void to_json(nlohmann::ordered_json& j, const Tolerances& t) {
  j = nlohmann::ordered_json{
      {"solver_rel_tol", t.solver_rel_tol},
      {"it_tol", t.it_tol},
      {"max_outer", t.max_outer},
      {"ordering_factor", t.ordering_factor},
      {"trace_tol", t.trace_tol},
      {"eigen_shift", t.eigen_shift},
      {"eigen_residual", t.eigen_residual},
      {"rayleigh_rel", t.rayleigh_rel},
      {"eigen_max_iter", t.eigen_max_iter},
      {"stability_floor", t.stability_floor},
      {"stability_residual", t.stability_residual},
      {"stability_max_iter", t.stability_max_iter},
      {"slope_F_max", t.slope_F_max},
      {"slope_W_max", t.slope_W_max},
      {"c_gate_factor", t.c_gate_factor},
      {"score_ratio_min", t.score_ratio_min},
      {"score_angles", t.score_angles},
      {"lipschitz_margin", t.lipschitz_margin},
  };
}

}  // namespace gac

#endif  // GAC_TOLERANCES_HPP
