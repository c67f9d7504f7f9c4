#pragma once

#include <random>

#include "cep/lp/problem.hpp"

namespace cep::testing {

// Small LP with integer data: 1-7 columns and rows, a mix of boxed,
// upper-bounded, free and nonnegative columns and all three row senses.
lp::Problem random_problem(std::mt19937_64& rng);

}  // namespace cep::testing
