#pragma once

#include "errors.hpp"
#include "rational.hpp"
#include "perm_prog.hpp"
#include "series.hpp"
#include "partial_sums.hpp"
#include "permutations.hpp"
#include "prediction.hpp"
#include "stochastic.hpp"
#include "spec_parse.hpp"
