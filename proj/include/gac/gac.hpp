#ifndef GAC_GAC_HPP
#define GAC_GAC_HPP

#include "gac/errors.hpp"
#include "gac/tolerances.hpp"
#include "gac/potential.hpp"
#include "gac/grid.hpp"
#include "gac/grushin_operator.hpp"
#include "gac/linear_solver.hpp"
#include "gac/principal_eigen.hpp"
#include "gac/construction.hpp"
#include "gac/ode.hpp"
#include "gac/verification.hpp"

#endif  // GAC_GAC_HPP
