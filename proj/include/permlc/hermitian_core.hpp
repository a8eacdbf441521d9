#pragma once

#include <cstdint>

#include "permlc/complex_matrix.hpp"
#include "permlc/jacobi.hpp"

namespace permlc {

// The factor L of B = L L*, stored as n linear functionals: row j holds the
// coefficients (l_j1, ..., l_jn) of ell_j(z) = sum_k l_jk z_k.
struct LinearFormBundle {
    ComplexMatrix rows;

    std::size_t size() const { return rows.size(); }
};

inline constexpr double kSpectrumTol = 1e-9;

// B = A - I. Requires spectrum(A) within [1 - tol, 2 + tol].
HermitianMatrix split_identity(const HermitianMatrix& a, double tol = kSpectrumTol);

// Spectral factorization L = U diag(sqrt(lambda)) of a PSD matrix with
// spectrum in [0, 1]; eigenvalues in [-tol, 0) are clamped to 0.
LinearFormBundle factor_psd(const HermitianMatrix& b, double tol = kSpectrumTol);

// C = conj(L* L), the matrix of the Hermitian form sum_j |ell_j(z)|^2.
HermitianMatrix gram_conjugate(const LinearFormBundle& l);

// L L*, for round-trip checks.
HermitianMatrix gram(const LinearFormBundle& l);

// A = I + U diag(spread * u_j) U* with u_j ~ Uniform[0,1) and U Haar-random
// (QR of a complex Ginibre matrix, R with positive diagonal). Spectrum lies
// in [1, 1 + spread]; the same seed reproduces the matrix bit-for-bit.
HermitianMatrix random_instance(std::size_t n, double spread, std::uint64_t seed);

// General random Hermitian matrix with the given spectrum, for tests.
HermitianMatrix random_with_spectrum(const std::vector<double>& spectrum, std::uint64_t seed);

}  // namespace permlc
