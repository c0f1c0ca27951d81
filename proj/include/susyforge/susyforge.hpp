#pragma once

// Umbrella header for the susy-forge library.

#include "confluent.hpp"
#include "dirac.hpp"
#include "fokker_planck.hpp"
#include "grid.hpp"
#include "io.hpp"
#include "oracles.hpp"
#include "quadrature.hpp"
#include "schrodinger.hpp"
#include "specfun.hpp"
