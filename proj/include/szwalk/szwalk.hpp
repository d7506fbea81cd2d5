#pragma once

// Umbrella header.

#include "szwalk/applications.hpp"
#include "szwalk/bench.hpp"
#include "szwalk/dsl.hpp"
#include "szwalk/error.hpp"
#include "szwalk/graph.hpp"
#include "szwalk/io.hpp"
#include "szwalk/operators.hpp"
#include "szwalk/reference.hpp"
#include "szwalk/semiclassical.hpp"
#include "szwalk/simulator.hpp"
#include "szwalk/state.hpp"
#include "szwalk/types.hpp"
