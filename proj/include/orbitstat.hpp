#pragma once

#include "orbitstat/integer.hpp"
#include "orbitstat/number_ring.hpp"
#include "orbitstat/matrix.hpp"
#include "orbitstat/lattice.hpp"
#include "orbitstat/lattice_config.hpp"
#include "orbitstat/orbit.hpp"
#include "orbitstat/cache.hpp"
#include "orbitstat/shapes.hpp"
#include "orbitstat/pairstats.hpp"
#include "orbitstat/pair_table.hpp"
#include "orbitstat/rng.hpp"
#include "orbitstat/haar.hpp"
#include "orbitstat/theta.hpp"
#include "orbitstat/correlation.hpp"
#include "orbitstat/checks.hpp"
#include "orbitstat/counting.hpp"
