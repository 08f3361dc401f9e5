#pragma once

#include "iaqsim/energy.hpp"
#include "iaqsim/engine.hpp"
#include "iaqsim/environment.hpp"
#include "iaqsim/metrics.hpp"
#include "iaqsim/network.hpp"
#include "iaqsim/node.hpp"
#include "iaqsim/report.hpp"
#include "iaqsim/rng.hpp"
#include "iaqsim/scenario.hpp"
#include "iaqsim/sensor_model.hpp"
#include "iaqsim/time.hpp"
