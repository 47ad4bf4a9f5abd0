#pragma once

// Whole-body safety-critical navigation: robot-frame signed distance fields,
// CLF/CBF constraint rows, a dense QP solver, and the closed-loop simulator.

#include "rcnav/dynamics.hpp"
#include "rcnav/geometry.hpp"
#include "rcnav/log_csv.hpp"
#include "rcnav/qp.hpp"
#include "rcnav/safety.hpp"
#include "rcnav/scenario.hpp"
#include "rcnav/scenario_json.hpp"
#include "rcnav/sim.hpp"
#include "rcnav/stability.hpp"
#include "rcnav/svg_plot.hpp"
