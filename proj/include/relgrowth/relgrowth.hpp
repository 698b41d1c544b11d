// relgrowth - relative growth of normal subgroups of hyperbolic groups
//
// Umbrella header.

#pragma once

#include "analysis.hpp"
#include "automaton.hpp"
#include "components.hpp"
#include "core.hpp"
#include "counting.hpp"
#include "export.hpp"
#include "fourier.hpp"
#include "lattice.hpp"
#include "oracle.hpp"
#include "series.hpp"
#include "spectral.hpp"
