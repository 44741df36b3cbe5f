/// Umbrella header.
#pragma once

#include "mirrornm/core.hpp"
#include "mirrornm/nonmarkov.hpp"
#include "mirrornm/solver.hpp"
#include "mirrornm/spectrum.hpp"
#include "mirrornm/sweep.hpp"
