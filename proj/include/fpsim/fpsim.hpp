#pragma once

// Umbrella header for the FPGA preemption scheduling simulator.

#include "fpsim/catalog.hpp"
#include "fpsim/context_store.hpp"
#include "fpsim/cost_model.hpp"
#include "fpsim/crc32.hpp"
#include "fpsim/crypto.hpp"
#include "fpsim/engine.hpp"
#include "fpsim/errors.hpp"
#include "fpsim/fabric.hpp"
#include "fpsim/kernel.hpp"
#include "fpsim/policies.hpp"
#include "fpsim/report.hpp"
#include "fpsim/resources.hpp"
#include "fpsim/rng.hpp"
#include "fpsim/scenario.hpp"
