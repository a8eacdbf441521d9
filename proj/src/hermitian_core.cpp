#include "permlc/hermitian_core.hpp"

#include <cmath>
#include <string>

#include "permlc/errors.hpp"
#include "permlc/rng.hpp"

namespace permlc {

namespace {

void require_spectrum_within(const std::vector<double>& eigenvalues, double lo, double hi,
                             double tol, const char* context) {
    for (double lambda : eigenvalues) {
        if (lambda < lo - tol || lambda > hi + tol) {
            throw SpectrumOutOfRange(
                lambda, std::string(context) + ": eigenvalue " + std::to_string(lambda) +
                            " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        }
    }
}

// Haar-random unitary via modified Gram-Schmidt QR of a Ginibre matrix.
// Normalization by the (real, positive) column norm fixes R's diagonal sign,
// which is what makes the distribution Haar. One re-orthogonalization pass
// keeps the columns orthonormal to machine precision.
ComplexMatrix haar_unitary(std::size_t n, Rng& rng) {
    ComplexMatrix g(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g(i, j) = rng.complex_normal();

    for (std::size_t j = 0; j < n; ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < j; ++k) {
                Complex proj{0.0, 0.0};
                for (std::size_t i = 0; i < n; ++i) proj += std::conj(g(i, k)) * g(i, j);
                for (std::size_t i = 0; i < n; ++i) g(i, j) -= proj * g(i, k);
            }
        }
        double norm2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) norm2 += std::norm(g(i, j));
        const double inv = 1.0 / std::sqrt(norm2);
        for (std::size_t i = 0; i < n; ++i) g(i, j) *= inv;
    }
    return g;
}

ComplexMatrix conjugate_by(const ComplexMatrix& u, const std::vector<double>& diag) {
    const std::size_t n = u.size();
    ComplexMatrix out(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            Complex s{0.0, 0.0};
            for (std::size_t m = 0; m < n; ++m) s += diag[m] * u(i, m) * std::conj(u(j, m));
            out(i, j) = s;
        }
    }
    return out;
}

}  // namespace

HermitianMatrix split_identity(const HermitianMatrix& a, double tol) {
    const SpectralDecomposition d = spectral_decompose(a);
    require_spectrum_within(d.eigenvalues, 1.0, 2.0, tol, "split_identity");
    ComplexMatrix b = a.matrix();
    for (std::size_t j = 0; j < b.size(); ++j) b(j, j) -= 1.0;
    return HermitianMatrix::symmetrized(std::move(b));
}

LinearFormBundle factor_psd(const HermitianMatrix& b, double tol) {
    const std::size_t n = b.size();
    const SpectralDecomposition d = spectral_decompose(b);
    require_spectrum_within(d.eigenvalues, 0.0, 1.0, tol, "factor_psd");

    ComplexMatrix l(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double lambda = std::max(d.eigenvalues[j], 0.0);
        const double root = std::sqrt(lambda);
        for (std::size_t i = 0; i < n; ++i) l(i, j) = d.eigenvectors(i, j) * root;
    }
    return LinearFormBundle{std::move(l)};
}

HermitianMatrix gram_conjugate(const LinearFormBundle& l) {
    const std::size_t n = l.size();
    ComplexMatrix c(n);
    for (std::size_t k1 = 0; k1 < n; ++k1) {
        for (std::size_t k2 = k1; k2 < n; ++k2) {
            Complex s{0.0, 0.0};
            for (std::size_t j = 0; j < n; ++j) s += l.rows(j, k1) * std::conj(l.rows(j, k2));
            c(k1, k2) = s;
            c(k2, k1) = std::conj(s);
        }
    }
    return HermitianMatrix::symmetrized(std::move(c));
}

HermitianMatrix gram(const LinearFormBundle& l) {
    const std::size_t n = l.size();
    ComplexMatrix b(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            Complex s{0.0, 0.0};
            for (std::size_t k = 0; k < n; ++k) s += l.rows(i, k) * std::conj(l.rows(j, k));
            b(i, j) = s;
            b(j, i) = std::conj(s);
        }
    }
    return HermitianMatrix::symmetrized(std::move(b));
}

HermitianMatrix random_instance(std::size_t n, double spread, std::uint64_t seed) {
    if (n < 1) throw BadInput("random_instance: n must be >= 1");
    if (spread < 0.0 || spread > 1.0) throw BadInput("random_instance: spread must be in [0, 1]");
    Rng rng(seed);
    std::vector<double> shift(n);
    for (std::size_t j = 0; j < n; ++j) shift[j] = spread * rng.uniform();
    const ComplexMatrix u = haar_unitary(n, rng);
    // A = I + U diag(shift) U*: adding the identity after conjugation keeps
    // the spread = 0 case exactly equal to I.
    HermitianMatrix b = HermitianMatrix::symmetrized(conjugate_by(u, shift));
    return add_identity(b, 1.0);
}

HermitianMatrix random_with_spectrum(const std::vector<double>& spectrum, std::uint64_t seed) {
    Rng rng(seed);
    const ComplexMatrix u = haar_unitary(spectrum.size(), rng);
    return HermitianMatrix::symmetrized(conjugate_by(u, spectrum));
}

}  // namespace permlc
