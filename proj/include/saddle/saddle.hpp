#pragma once

// Umbrella header: the entire library.

#include "saddle/errors.hpp"
#include "saddle/extended.hpp"
#include "saddle/space.hpp"
#include "saddle/minimax.hpp"
#include "saddle/perturb.hpp"
#include "saddle/wellposed.hpp"
#include "saddle/expr.hpp"
#include "saddle/problem.hpp"
#include "saddle/report.hpp"
