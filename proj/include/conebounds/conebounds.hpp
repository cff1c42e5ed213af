#pragma once

// Umbrella header: cone geometry and widths, the four estimators, the error
// bound formulas, and the sweep harness.

#include "conebounds/bounds.hpp"
#include "conebounds/cones.hpp"
#include "conebounds/experiments.hpp"
#include "conebounds/gamma.hpp"
#include "conebounds/projections.hpp"
#include "conebounds/restricted.hpp"
#include "conebounds/rng.hpp"
#include "conebounds/solvers.hpp"
#include "conebounds/structure.hpp"
#include "conebounds/width.hpp"
