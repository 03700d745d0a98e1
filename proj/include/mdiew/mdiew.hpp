#pragma once

// Umbrella header for the MDI entanglement-witness library.

#include "mdiew/complex_matrix.hpp"
#include "mdiew/detector.hpp"
#include "mdiew/errors.hpp"
#include "mdiew/linalg.hpp"
#include "mdiew/mdi.hpp"
#include "mdiew/rng.hpp"
#include "mdiew/states.hpp"
#include "mdiew/tolerances.hpp"
#include "mdiew/witness.hpp"
