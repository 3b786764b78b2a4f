#pragma once

#include "gamecond/errors.hpp"
#include "gamecond/tolerances.hpp"
#include "gamecond/game.hpp"
#include "gamecond/linprog.hpp"
#include "gamecond/projection.hpp"
#include "gamecond/min_norm.hpp"
#include "gamecond/equilibrium.hpp"
#include "gamecond/regularity.hpp"
#include "gamecond/smoothing.hpp"
#include "gamecond/io.hpp"
