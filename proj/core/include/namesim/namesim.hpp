#pragma once

#include "namesim/algebra.hpp"
#include "namesim/bath.hpp"
#include "namesim/compare.hpp"
#include "namesim/config.hpp"
#include "namesim/errors.hpp"
#include "namesim/exact_bench.hpp"
#include "namesim/name_solver.hpp"
#include "namesim/propagation.hpp"
#include "namesim/protocol.hpp"
#include "namesim/scenario.hpp"
#include "namesim/trajectory_io.hpp"
#include "namesim/units.hpp"
