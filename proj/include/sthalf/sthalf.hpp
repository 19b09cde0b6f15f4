#pragma once

#include "sthalf/core.hpp"
#include "sthalf/eval.hpp"
#include "sthalf/io.hpp"
#include "sthalf/noise.hpp"
#include "sthalf/optim.hpp"
#include "sthalf/random.hpp"
#include "sthalf/selftrain.hpp"
