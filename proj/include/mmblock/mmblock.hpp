#pragma once

#include "mmblock/chain.hpp"
#include "mmblock/config.hpp"
#include "mmblock/config_io.hpp"
#include "mmblock/format.hpp"
#include "mmblock/metrics.hpp"
#include "mmblock/model.hpp"
#include "mmblock/probability.hpp"
#include "mmblock/simulate.hpp"
#include "mmblock/sweep.hpp"
#include "mmblock/throughput.hpp"
#include "mmblock/trace.hpp"
