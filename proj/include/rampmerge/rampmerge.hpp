#pragma once

#include "rampmerge/types.hpp"
#include "rampmerge/rng.hpp"
#include "rampmerge/scenario.hpp"
#include "rampmerge/dynamics.hpp"
#include "rampmerge/conflict.hpp"
#include "rampmerge/game.hpp"
#include "rampmerge/metrics.hpp"
#include "rampmerge/engine.hpp"
#include "rampmerge/csv.hpp"
#include "rampmerge/sweep.hpp"
