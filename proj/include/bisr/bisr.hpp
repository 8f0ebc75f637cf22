#pragma once

// Umbrella header.

#include "bisr/bivariate.hpp"
#include "bisr/convexity.hpp"
#include "bisr/diagnostics.hpp"
#include "bisr/experiment.hpp"
#include "bisr/io.hpp"
#include "bisr/linop.hpp"
#include "bisr/penalty.hpp"
#include "bisr/rng.hpp"
#include "bisr/solver.hpp"
