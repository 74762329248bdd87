#pragma once

#include "catlink/atmosphere.hpp"
#include "catlink/beam_wandering.hpp"
#include "catlink/cat_state.hpp"
#include "catlink/channel.hpp"
#include "catlink/elliptic.hpp"
#include "catlink/errors.hpp"
#include "catlink/experiment.hpp"
#include "catlink/gaussian_mixture.hpp"
#include "catlink/parallel.hpp"
#include "catlink/phase_point.hpp"
#include "catlink/random.hpp"
#include "catlink/run_config.hpp"
#include "catlink/specfun.hpp"
#include "catlink/teleport.hpp"
#include "catlink/teleport_grid.hpp"
#include "catlink/tmsv.hpp"
#include "catlink/wigner_grid.hpp"
