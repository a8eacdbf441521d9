#pragma once

#include <vector>

#include "permlc/complex_matrix.hpp"

namespace permlc {

struct SpectralDecomposition {
    std::vector<double> eigenvalues;  // ascending
    ComplexMatrix eigenvectors;       // columns, unitary
};

// Cyclic Jacobi for Hermitian matrices. Self-contained and accurate at desk
// scale; throws EigenNonConvergence if the sweep budget runs out.
SpectralDecomposition spectral_decompose(const HermitianMatrix& m);

// Reconstruction U diag(lambda) U*.
ComplexMatrix reconstruct(const SpectralDecomposition& d);

}  // namespace permlc
