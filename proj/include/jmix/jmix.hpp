#pragma once

#include "jmix/constants.hpp"
#include "jmix/conversion.hpp"
#include "jmix/coupled.hpp"
#include "jmix/devices.hpp"
#include "jmix/errors.hpp"
#include "jmix/fitting.hpp"
#include "jmix/io.hpp"
#include "jmix/jrm.hpp"
#include "jmix/noise.hpp"
#include "jmix/optimize.hpp"
#include "jmix/parallel.hpp"
#include "jmix/resonant.hpp"
#include "jmix/ripple.hpp"
#include "jmix/sweep.hpp"
#include "jmix/twoport.hpp"
