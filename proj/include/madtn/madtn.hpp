#pragma once

// Umbrella header.
#include "madtn/errors.hpp"
#include "madtn/extended_real.hpp"
#include "madtn/stn.hpp"
#include "madtn/daisy.hpp"
#include "madtn/planner.hpp"
#include "madtn/rng.hpp"
#include "madtn/simulator.hpp"
#include "madtn/interval_set.hpp"
#include "madtn/fluency.hpp"
#include "madtn/io.hpp"
