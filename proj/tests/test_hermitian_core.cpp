#include <doctest.h>

#include <cmath>

#include "permlc/hermitian_core.hpp"
#include "permlc/jacobi.hpp"
#include "permlc/rng.hpp"

using namespace permlc;

namespace {

HermitianMatrix random_hermitian(std::size_t n, Rng& rng) {
    ComplexMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = Complex{2.0 * rng.normal(), 0.0};
        for (std::size_t j = i + 1; j < n; ++j) {
            m(i, j) = Complex{rng.normal(), rng.normal()};
            m(j, i) = std::conj(m(i, j));
        }
    }
    return HermitianMatrix::from_matrix(std::move(m));
}

double unitarity_residual(const ComplexMatrix& u) {
    const ComplexMatrix p = multiply(adjoint(u), u);
    return max_abs_diff(p, ComplexMatrix::identity(u.size()));
}

}  // namespace

TEST_CASE("spectral_decompose: identity") {
    const auto d = spectral_decompose(HermitianMatrix::identity(3));
    for (double lambda : d.eigenvalues) CHECK(lambda == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(unitarity_residual(d.eigenvectors) <= 1e-10);
    CHECK(max_abs_diff(reconstruct(d), HermitianMatrix::identity(3).matrix()) <= 1e-10);
}

TEST_CASE("spectral_decompose: already diagonal") {
    ComplexMatrix m(2);
    m(0, 0) = 0.2;
    m(1, 1) = 0.7;
    const auto d = spectral_decompose(HermitianMatrix::from_matrix(std::move(m)));
    CHECK(d.eigenvalues[0] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(d.eigenvalues[1] == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("spectral_decompose: 2x2 real symmetric closed form") {
    // eigenvalues of [[a, b], [b, a]] are a -+ b
    ComplexMatrix m(2);
    m(0, 0) = m(1, 1) = 0.5;
    m(0, 1) = m(1, 0) = 0.25;
    const auto d = spectral_decompose(HermitianMatrix::from_matrix(std::move(m)));
    CHECK(d.eigenvalues[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(d.eigenvalues[1] == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("spectral_decompose: reconstruction and unitarity on random matrices") {
    Rng rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.next_u64() % 16);
        const HermitianMatrix m = random_hermitian(n, rng);
        const auto d = spectral_decompose(m);
        const double scale = std::max(1.0, m.matrix().max_abs());
        REQUIRE(max_abs_diff(reconstruct(d), m.matrix()) <= 1e-10 * scale);
        REQUIRE(unitarity_residual(d.eigenvectors) <= 1e-10);
        for (std::size_t j = 1; j < n; ++j) REQUIRE(d.eigenvalues[j - 1] <= d.eigenvalues[j]);
    }
}

TEST_CASE("split_identity: A = I and A = 2I") {
    const HermitianMatrix b0 = split_identity(HermitianMatrix::identity(3));
    CHECK(b0.matrix().max_abs() == 0.0);

    ComplexMatrix two = ComplexMatrix::identity(2);
    two(0, 0) = two(1, 1) = 2.0;
    const HermitianMatrix b1 = split_identity(HermitianMatrix::from_matrix(std::move(two)));
    CHECK(max_abs_diff(b1.matrix(), ComplexMatrix::identity(2)) == 0.0);
}

TEST_CASE("split_identity: rejects spectrum outside [1,2]") {
    ComplexMatrix m(2);
    m(0, 0) = 2.5;
    m(1, 1) = 1.0;
    const HermitianMatrix a = HermitianMatrix::from_matrix(std::move(m));
    CHECK_THROWS_AS(split_identity(a), SpectrumOutOfRange);
    try {
        split_identity(a);
    } catch (const SpectrumOutOfRange& e) {
        CHECK(e.offending_eigenvalue() == doctest::Approx(2.5).epsilon(1e-12));
    }
}

TEST_CASE("split_identity: adding I back reproduces A bit-for-bit") {
    for (std::uint64_t seed = 0; seed < 16; ++seed) {
        const HermitianMatrix a = random_instance(5, 1.0, seed);
        const HermitianMatrix b = split_identity(a);
        const HermitianMatrix back = add_identity(b, 1.0);
        const std::size_t n = a.size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                REQUIRE(back(i, j).real() == a(i, j).real());
                REQUIRE(back(i, j).imag() == a(i, j).imag());
            }
    }
}

TEST_CASE("factor_psd: zero and identity") {
    const LinearFormBundle l0 = factor_psd(HermitianMatrix::zero(3));
    CHECK(l0.rows.max_abs() == 0.0);

    const LinearFormBundle l1 = factor_psd(HermitianMatrix::identity(3));
    CHECK(max_abs_diff(gram(l1).matrix(), ComplexMatrix::identity(3)) <= 1e-12);
}

TEST_CASE("factor_psd: 2x2 via closed-form eigenvalues") {
    ComplexMatrix m(2);
    m(0, 0) = m(1, 1) = 0.5;
    m(0, 1) = m(1, 0) = 0.25;
    const HermitianMatrix b = HermitianMatrix::from_matrix(std::move(m));
    const LinearFormBundle l = factor_psd(b);
    CHECK(max_abs_diff(gram(l).matrix(), b.matrix()) <= 1e-10);
}

TEST_CASE("factor_psd: round-trip on random PSD matrices with spectrum in [0,1]") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.next_u64() % 10);
        std::vector<double> spectrum(n);
        for (double& lambda : spectrum) lambda = rng.uniform();
        const HermitianMatrix b = random_with_spectrum(spectrum, rng.next_u64());
        const LinearFormBundle l = factor_psd(b);
        const double scale = std::max(1.0, b.matrix().max_abs());
        REQUIRE(max_abs_diff(gram(l).matrix(), b.matrix()) <= 1e-10 * scale);
    }
}

TEST_CASE("factor_psd: clamps tiny negative eigenvalues, rejects real ones") {
    std::vector<double> spectrum = {-5e-10, 0.5};
    const HermitianMatrix b = random_with_spectrum(spectrum, 3);
    CHECK_NOTHROW(factor_psd(b));

    std::vector<double> bad = {-1e-6, 0.5};
    CHECK_THROWS_AS(factor_psd(random_with_spectrum(bad, 3)), SpectrumOutOfRange);
    std::vector<double> high = {0.5, 1.5};
    CHECK_THROWS_AS(factor_psd(random_with_spectrum(high, 3)), SpectrumOutOfRange);
}

TEST_CASE("gram_conjugate: zero, identity, and spectrum transport") {
    CHECK(gram_conjugate(LinearFormBundle{ComplexMatrix(3)}).matrix().max_abs() == 0.0);
    CHECK(max_abs_diff(gram_conjugate(LinearFormBundle{ComplexMatrix::identity(3)}).matrix(),
                       ComplexMatrix::identity(3)) == 0.0);

    ComplexMatrix m(2);
    m(0, 0) = m(1, 1) = 0.5;
    m(0, 1) = m(1, 0) = 0.25;
    const LinearFormBundle l = factor_psd(HermitianMatrix::from_matrix(std::move(m)));
    const auto d = spectral_decompose(gram_conjugate(l));
    CHECK(d.eigenvalues[0] == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(d.eigenvalues[1] == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("gram_conjugate: spectrum stays in [0,1] even for singular L") {
    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.next_u64() % 7);
        std::vector<double> spectrum(n);
        for (double& lambda : spectrum) lambda = rng.uniform();
        spectrum[0] = 0.0;  // force a singular factor
        const HermitianMatrix b = random_with_spectrum(spectrum, rng.next_u64());
        const LinearFormBundle l = factor_psd(b);
        const auto d = spectral_decompose(gram_conjugate(l));
        REQUIRE(d.eigenvalues.front() >= -1e-9);
        REQUIRE(d.eigenvalues.back() <= 1.0 + 1e-9);
    }
}

TEST_CASE("random_instance: degenerate n=1 spread=0 gives [1]") {
    const HermitianMatrix a = random_instance(1, 0.0, 42);
    CHECK(a(0, 0).real() == 1.0);
    CHECK(a(0, 0).imag() == 0.0);
}

TEST_CASE("random_instance: deterministic under a fixed seed") {
    const HermitianMatrix a = random_instance(3, 1.0, 7);
    const HermitianMatrix b = random_instance(3, 1.0, 7);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(a(i, j).real() == b(i, j).real());
            CHECK(a(i, j).imag() == b(i, j).imag());
        }
}

TEST_CASE("random_instance: admissible spectrum and Hermitian invariant") {
    const HermitianMatrix a = random_instance(4, 1.0, 3);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(a(i, j).real() == a(j, i).real());
            CHECK(a(i, j).imag() == -a(j, i).imag());
        }
    const auto d = spectral_decompose(a);
    CHECK(d.eigenvalues.front() >= 1.0 - 1e-9);
    CHECK(d.eigenvalues.back() <= 2.0 + 1e-9);
}

TEST_CASE("HermitianMatrix: constructor rejects real asymmetry") {
    ComplexMatrix m(2);
    m(0, 1) = Complex{1.0, 0.0};
    m(1, 0) = Complex{0.5, 0.0};
    CHECK_THROWS_AS(HermitianMatrix::from_matrix(std::move(m)), BadInput);
}
