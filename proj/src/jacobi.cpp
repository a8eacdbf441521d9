#include "permlc/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "permlc/errors.hpp"

namespace permlc {

namespace {

double off_diagonal_norm(const ComplexMatrix& a) {
    const std::size_t n = a.size();
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = p + 1; q < n; ++q) s += std::norm(a(p, q));
    return std::sqrt(2.0 * s);
}

// Unitary that diagonalizes the 2x2 Hermitian block [[a, r z], [r z~, b]]
// with r = |A(p,q)|, z = A(p,q)/r. Columns (c z, s) and (-s z, c); the
// tangent t solves t^2 - 2 tau t - 1 = 0 with tau = (b - a)/(2r), taking the
// root of smaller magnitude for stability.
struct Rotation {
    Complex cz;   // c * z
    Complex msz;  // -s * z
    double c;
    double s;
    double t;
};

Rotation make_rotation(double a, double b, Complex apq, double r) {
    const Complex z = apq / r;
    const double tau = (b - a) / (2.0 * r);
    const double sign = (tau > 0.0) ? 1.0 : -1.0;
    const double t = -sign / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    return Rotation{c * z, -s * z, c, s, t};
}

}  // namespace

SpectralDecomposition spectral_decompose(const HermitianMatrix& m) {
    const std::size_t n = m.size();
    ComplexMatrix a = m.matrix();
    ComplexMatrix u = ComplexMatrix::identity(n);

    if (n == 1) {
        return SpectralDecomposition{{a(0, 0).real()}, u};
    }

    const double scale = std::max(1.0, a.max_abs());
    const double tol = 1e-15 * scale;
    const int max_sweeps = 64;

    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        if (off_diagonal_norm(a) <= tol) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double r = std::abs(a(p, q));
                if (r <= tol / static_cast<double>(n)) {
                    a(p, q) = Complex{0.0, 0.0};
                    a(q, p) = Complex{0.0, 0.0};
                    continue;
                }
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const Rotation rot = make_rotation(app, aqq, a(p, q), r);

                a(p, p) = Complex{app + rot.t * r, 0.0};
                a(q, q) = Complex{aqq - rot.t * r, 0.0};
                a(p, q) = Complex{0.0, 0.0};
                a(q, p) = Complex{0.0, 0.0};

                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const Complex akp = a(k, p);
                    const Complex akq = a(k, q);
                    a(k, p) = akp * rot.cz + akq * rot.s;
                    a(k, q) = akp * rot.msz + akq * rot.c;
                    a(p, k) = std::conj(a(k, p));
                    a(q, k) = std::conj(a(k, q));
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex ukp = u(k, p);
                    const Complex ukq = u(k, q);
                    u(k, p) = ukp * rot.cz + ukq * rot.s;
                    u(k, q) = ukp * rot.msz + ukq * rot.c;
                }
            }
        }
    }

    const double residual = off_diagonal_norm(a);
    if (residual > tol) {
        throw EigenNonConvergence("Jacobi iteration failed to converge on a " +
                                  std::to_string(n) + "x" + std::to_string(n) +
                                  " Hermitian matrix after " + std::to_string(max_sweeps) +
                                  " sweeps; off-diagonal residual " + std::to_string(residual));
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return a(i, i).real() < a(j, j).real();
    });

    SpectralDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = ComplexMatrix(n);
    for (std::size_t j = 0; j < n; ++j) {
        out.eigenvalues[j] = a(order[j], order[j]).real();
        for (std::size_t k = 0; k < n; ++k) out.eigenvectors(k, j) = u(k, order[j]);
    }
    return out;
}

ComplexMatrix reconstruct(const SpectralDecomposition& d) {
    const std::size_t n = d.eigenvalues.size();
    ComplexMatrix out(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            Complex s{0.0, 0.0};
            for (std::size_t k = 0; k < n; ++k)
                s += d.eigenvalues[k] * d.eigenvectors(i, k) * std::conj(d.eigenvectors(j, k));
            out(i, j) = s;
        }
    }
    return out;
}

}  // namespace permlc
