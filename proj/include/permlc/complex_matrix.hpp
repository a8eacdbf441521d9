#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "permlc/errors.hpp"

namespace permlc {

using Complex = std::complex<double>;

// Dense square complex matrix, row-major.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(std::size_t n) : n_(n), a_(n * n, Complex{0.0, 0.0}) {}

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n);
        for (std::size_t j = 0; j < n; ++j) m(j, j) = Complex{1.0, 0.0};
        return m;
    }

    std::size_t size() const { return n_; }

    Complex& operator()(std::size_t row, std::size_t col) { return a_[row * n_ + col]; }
    const Complex& operator()(std::size_t row, std::size_t col) const { return a_[row * n_ + col]; }

    const std::vector<Complex>& entries() const { return a_; }
    std::vector<Complex>& entries() { return a_; }

    double max_abs() const {
        double m = 0.0;
        for (const Complex& z : a_) m = std::max(m, std::abs(z));
        return m;
    }

    bool all_finite() const {
        for (const Complex& z : a_) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        }
        return true;
    }

private:
    std::size_t n_ = 0;
    std::vector<Complex> a_;
};

inline ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t n = a.size();
    if (b.size() != n) throw DimensionMismatch("matrix product dimension mismatch");
    ComplexMatrix c(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{0.0, 0.0}) continue;
            for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

inline ComplexMatrix adjoint(const ComplexMatrix& a) {
    const std::size_t n = a.size();
    ComplexMatrix c(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) c(i, j) = std::conj(a(j, i));
    return c;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t n = a.size();
    if (b.size() != n) throw DimensionMismatch("matrix comparison dimension mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

// Hermitian matrix. Construction symmetrizes so that afterwards
// entries[j][k] == conj(entries[k][j]) holds bit-exactly and the diagonal
// is real. from_matrix rejects inputs whose asymmetry exceeds the tolerance.
class HermitianMatrix {
public:
    HermitianMatrix() = default;

    static HermitianMatrix zero(std::size_t n) { return HermitianMatrix(ComplexMatrix(n)); }

    static HermitianMatrix identity(std::size_t n) {
        return HermitianMatrix(ComplexMatrix::identity(n));
    }

    // Symmetrize unconditionally. For matrices assembled as U diag U* whose
    // asymmetry is pure round-off.
    static HermitianMatrix symmetrized(ComplexMatrix m) {
        if (!m.all_finite()) throw BadInput("matrix entries must be finite");
        return HermitianMatrix(std::move(m));
    }

    static HermitianMatrix from_matrix(ComplexMatrix m, double tol = 1e-12) {
        if (!m.all_finite()) throw BadInput("matrix entries must be finite");
        const double scale = std::max(1.0, m.max_abs());
        double asym = 0.0;
        const std::size_t n = m.size();
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = j; k < n; ++k)
                asym = std::max(asym, std::abs(m(j, k) - std::conj(m(k, j))));
        if (asym > tol * scale)
            throw BadInput("matrix is not Hermitian: asymmetry " + std::to_string(asym));
        return HermitianMatrix(std::move(m));
    }

    std::size_t size() const { return m_.size(); }
    const ComplexMatrix& matrix() const { return m_; }
    const Complex& operator()(std::size_t row, std::size_t col) const { return m_(row, col); }

private:
    explicit HermitianMatrix(ComplexMatrix m) : m_(std::move(m)) {
        const std::size_t n = m_.size();
        for (std::size_t j = 0; j < n; ++j) {
            m_(j, j) = Complex{m_(j, j).real(), 0.0};
            for (std::size_t k = j + 1; k < n; ++k) {
                const Complex v = 0.5 * (m_(j, k) + std::conj(m_(k, j)));
                m_(j, k) = v;
                m_(k, j) = std::conj(v);
            }
        }
    }

    ComplexMatrix m_;
};

inline HermitianMatrix add_identity(const HermitianMatrix& b, double scale = 1.0) {
    ComplexMatrix m = b.matrix();
    for (std::size_t j = 0; j < m.size(); ++j) m(j, j) += scale;
    return HermitianMatrix::symmetrized(std::move(m));
}

}  // namespace permlc
