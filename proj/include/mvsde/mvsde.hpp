#pragma once

#include "mvsde/ensemble.hpp"
#include "mvsde/errors.hpp"
#include "mvsde/euler.hpp"
#include "mvsde/exact_linear.hpp"
#include "mvsde/measure.hpp"
#include "mvsde/mle.hpp"
#include "mvsde/model.hpp"
#include "mvsde/path.hpp"
#include "mvsde/picard.hpp"
#include "mvsde/rng.hpp"
#include "mvsde/stats.hpp"
#include "mvsde/strong_error.hpp"
