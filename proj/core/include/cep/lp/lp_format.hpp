#pragma once

#include <ostream>
#include <string>

#include "cep/lp/problem.hpp"

namespace cep::lp {

// Writes the problem in CPLEX LP text format, readable by most external
// solvers for cross-checking. Unnamed or duplicate-prone names are replaced by
// x<j> / c<i>.
void write_lp_format(const Problem& problem, std::ostream& out);

std::string to_lp_format(const Problem& problem);

}  // namespace cep::lp
