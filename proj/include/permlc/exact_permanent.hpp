#pragma once

#include "permlc/complex_matrix.hpp"

namespace permlc {

struct PermanentValue {
    Complex value;
};

// Sum over all n! permutations of prod_k a_{k sigma(k)}. Ground truth for
// everything else; guarded at n <= 10.
PermanentValue permanent_definition(const ComplexMatrix& m);

// Ryser inclusion-exclusion with Gray-code incremental row sums, O(2^n n).
// Guarded at n <= 28.
PermanentValue permanent_ryser(const ComplexMatrix& m);

// Sum over all principal submatrices: sum_{J subset {1..n}} per(B_J) with
// per(B_empty) = 1. Equals per(I + B). Guarded at n <= 12.
PermanentValue subset_expansion(const HermitianMatrix& b);

}  // namespace permlc
