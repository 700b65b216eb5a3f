#pragma once

#include <optional>
#include <vector>

#include "nodalcone/polynomial.hpp"

namespace nodalcone {

// Decomposition of a homogeneous G of degree k as
//   G = h_k + |x|^2 h_{k-2} + |x|^4 h_{k-4} + ...
// with every h_j harmonic and homogeneous of degree j (or zero).
// components[j] is the factor of |x|^(2j), so components[0] = h_k.
struct HarmonicDecomposition {
  int dimension = 0;
  int degree = 0;
  std::vector<Polynomial> components;

  Polynomial reconstruct() const;
};

// Exact decomposition; throws std::invalid_argument when g is zero or not
// homogeneous (homogeneity is verified through the Euler identity
// sum_i x_i d_i g == deg(g) * g).
HarmonicDecomposition gauss_decompose(const Polynomial& g);

// True iff psi divides every iterated Laplacian of g (including g itself).
// This is the exact divisibility criterion deciding whether the zero set of a
// harmonic homogeneous psi is contained in the stationary set generated by g.
bool divides_all_laplacians(const Polynomial& psi, const Polynomial& g);

// Search for a homogeneous Q != 0 with P*Q harmonic, deg Q <= max_extra_degree.
struct HarmonicMultipleWitness {
  std::optional<Polynomial> multiplier;  // some Q when found
  int searched_up_to = 0;                // inclusive degree bound that was exhausted

  bool found() const { return multiplier.has_value(); }
};

HarmonicMultipleWitness find_harmonic_multiple(const Polynomial& p, int max_extra_degree);

}  // namespace nodalcone
