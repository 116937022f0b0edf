#pragma once

#include "kolmo/config.hpp"
#include "kolmo/diagnostics.hpp"
#include "kolmo/experiments.hpp"
#include "kolmo/grid.hpp"
#include "kolmo/model.hpp"
#include "kolmo/oracles.hpp"
#include "kolmo/timestepper.hpp"
#include "kolmo/trig_poly.hpp"
#include "kolmo/version.hpp"
