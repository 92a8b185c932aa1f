#pragma once

#include "affpop/analysis.hpp"
#include "affpop/config.hpp"
#include "affpop/default_config.hpp"
#include "affpop/emotion.hpp"
#include "affpop/engine.hpp"
#include "affpop/error.hpp"
#include "affpop/harmony.hpp"
#include "affpop/midi.hpp"
#include "affpop/performers.hpp"
#include "affpop/realtime.hpp"
#include "affpop/rhythm.hpp"
#include "affpop/rng.hpp"
#include "affpop/service.hpp"
#include "affpop/stimuli.hpp"
#include "affpop/trajectory_io.hpp"
#include "affpop/wire.hpp"
