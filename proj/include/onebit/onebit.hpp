#pragma once

#include "onebit/real_expansion.hpp"
#include "onebit/constellation.hpp"
#include "onebit/solver_audit.hpp"
#include "onebit/maxmin_lp.hpp"
#include "onebit/box_ls.hpp"
#include "onebit/ci_geometry.hpp"
#include "onebit/bb.hpp"
#include "onebit/precoders.hpp"
#include "onebit/sim.hpp"
#include "onebit/config.hpp"
