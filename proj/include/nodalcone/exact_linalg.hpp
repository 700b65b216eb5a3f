#pragma once

#include <optional>
#include <vector>

#include "nodalcone/rational.hpp"

namespace nodalcone {

// Dense row-major matrix over the rationals.
using ExactMatrix = std::vector<std::vector<Rational>>;

// One exact solution of A x = b (free variables set to zero), or nullopt if
// the system is inconsistent.
std::optional<std::vector<Rational>> solve_exact(ExactMatrix a, std::vector<Rational> b);

// Basis of the null space of A (empty when A is injective).
std::vector<std::vector<Rational>> nullspace_exact(ExactMatrix a, int columns);

}  // namespace nodalcone
