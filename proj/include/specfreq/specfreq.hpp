#pragma once

#include "specfreq/bootstrap.hpp"
#include "specfreq/core.hpp"
#include "specfreq/fdr.hpp"
#include "specfreq/global_test.hpp"
#include "specfreq/longrun.hpp"
#include "specfreq/rng.hpp"
#include "specfreq/simulate.hpp"
#include "specfreq/spectral.hpp"
#include "specfreq/timeseries.hpp"
