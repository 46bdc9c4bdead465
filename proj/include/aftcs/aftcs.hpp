#pragma once

#include "aftcs/bandwidth.hpp"
#include "aftcs/channel.hpp"
#include "aftcs/core.hpp"
#include "aftcs/fault_info.hpp"
#include "aftcs/heap.hpp"
#include "aftcs/metrics.hpp"
#include "aftcs/priority_engine.hpp"
#include "aftcs/report.hpp"
#include "aftcs/reservation.hpp"
#include "aftcs/rng.hpp"
#include "aftcs/scenario.hpp"
#include "aftcs/simulation.hpp"
#include "aftcs/trace.hpp"
