#pragma once

#include "sots/arith.hpp"
#include "sots/bitvec.hpp"
#include "sots/common.hpp"
#include "sots/local.hpp"
#include "sots/rational.hpp"
#include "sots/regions.hpp"
#include "sots/series.hpp"
#include "sots/sieve.hpp"
#include "sots/stats.hpp"
