#pragma once

#include "rkcont/config.hpp"
#include "rkcont/continuation.hpp"
#include "rkcont/errors.hpp"
#include "rkcont/kernels.hpp"
#include "rkcont/oracle.hpp"
#include "rkcont/recovery.hpp"
#include "rkcont/spectral.hpp"
#include "rkcont/types.hpp"
