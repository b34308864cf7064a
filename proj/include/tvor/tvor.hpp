#pragma once

// Umbrella header for the library modules (I/O helpers live under tvor/io/).

#include "tvor/diagnostics.hpp"
#include "tvor/digits.hpp"
#include "tvor/engine.hpp"
#include "tvor/error.hpp"
#include "tvor/histogram.hpp"
#include "tvor/least_squares.hpp"
#include "tvor/random.hpp"
#include "tvor/records.hpp"
#include "tvor/simulation.hpp"
#include "tvor/special_functions.hpp"
