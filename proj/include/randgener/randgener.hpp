#pragma once

// Umbrella header.

#include "randgener/bench.hpp"
#include "randgener/drb_engine.hpp"
#include "randgener/fixtures.hpp"
#include "randgener/sim_net.hpp"
#include "randgener/simulation.hpp"
#include "randgener/transcript_store.hpp"
#include "randgener/vdf.hpp"
