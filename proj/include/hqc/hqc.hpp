#pragma once

#include "config.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "fidelity.hpp"
#include "holonomy.hpp"
#include "linalg.hpp"
#include "model.hpp"
#include "noise.hpp"
#include "parallel.hpp"
#include "propagate.hpp"
#include "units.hpp"
