#pragma once

#include <ostream>

#include "dem/ode.hpp"
#include "dem/simulate.hpp"

namespace dem {

/// Columns t, y_1..y_a; 12 significant digits.
void write_solution_csv(std::ostream& out, const OdeSolution& sol);

/// Columns i, Y_1..Y_a, drift_1..drift_a, flags. The stopping row has empty
/// drift cells and flags.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace dem
