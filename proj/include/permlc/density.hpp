#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "permlc/complex_matrix.hpp"
#include "permlc/hermitian_core.hpp"

namespace permlc {

// A point z in C^n, identified with (x, y) in R^{2n} via z = x + iy.
struct PointC {
    std::vector<Complex> z;

    std::size_t size() const { return z.size(); }

    static PointC zero(std::size_t n) { return PointC{std::vector<Complex>(n, Complex{})}; }

    // real layout (x_1..x_n, y_1..y_n)
    static PointC from_real(std::span<const double> xy);
    std::vector<double> to_real() const;
};

// The integrand built from an admissible matrix A = I + L L*:
//
//   f(z) = pi^{-n} exp(-|z|^2) prod_j (1 + |ell_j(z)|^2)
//
// held in log space together with the quadratic form q of matrix I - C,
// C = conj(L* L), which certifies log-concavity.
class DensityModel {
public:
    static DensityModel from_forms(LinearFormBundle forms, double tol = kSpectrumTol);

    // Skips the PSD gate on I - C. For negative tests with bundles outside
    // the admissible class.
    static DensityModel from_forms_unchecked(LinearFormBundle forms);

    std::size_t size() const { return forms_.size(); }
    const LinearFormBundle& forms() const { return forms_; }
    const HermitianMatrix& q_matrix() const { return q_matrix_; }
    double log_normalizer() const { return log_normalizer_; }  // -n ln(pi)

private:
    DensityModel(LinearFormBundle forms, HermitianMatrix q_matrix, double log_normalizer)
        : forms_(std::move(forms)), q_matrix_(std::move(q_matrix)), log_normalizer_(log_normalizer) {}

    LinearFormBundle forms_;
    HermitianMatrix q_matrix_;  // I - C
    double log_normalizer_;
};

// split_identity + factor_psd + gram_conjugate on an admissible A.
DensityModel build_density(const HermitianMatrix& a, double tol = kSpectrumTol);

// (ell_1(z), ..., ell_n(z)) = L z.
std::vector<Complex> eval_linear_forms(const DensityModel& d, const PointC& z);

// log f(z) = -n ln(pi) - |z|^2 + sum_j ln(1 + |ell_j(z)|^2). Always finite.
double log_density(const DensityModel& d, const PointC& z);

// Gradient of log f over R^{2n}, layout (d/dx_1..d/dx_n, d/dy_1..d/dy_n).
std::vector<double> grad_log_density(const DensityModel& d, const PointC& z);

// Annealed family: |ell_j|^2 scaled by beta in [0, 1]; equivalent to
// replacing L with sqrt(beta) L, which stays inside the admissible class.
double log_density_scaled(const DensityModel& d, const PointC& z, double beta);
std::vector<double> grad_log_density_scaled(const DensityModel& d, const PointC& z, double beta);

// q(z) = Re(z* (I - C) z), the Gaussian-excess part of -log f.
double quadratic_q(const DensityModel& d, const PointC& z);

// Random-segment check of log f(a x1 + (1-a) x2) >= a log f(x1) + (1-a) log f(x2).
// Returns the violation count beyond tolerance 1e-9; 0 for any model in the
// admissible class.
int check_logconcavity(const DensityModel& d, int trials, std::uint64_t seed);

// Minimum eigenvalue of I - C; >= -1e-9 certifies q is PSD.
double check_q_psd(const DensityModel& d);

// Real positive semidefinite quadratic form on R^m, row-major coefficients.
struct QuadraticForm {
    std::size_t dim = 0;
    std::vector<double> coeffs;

    static QuadraticForm zero(std::size_t m) {
        return QuadraticForm{m, std::vector<double>(m * m, 0.0)};
    }
    static QuadraticForm identity(std::size_t m) {
        QuadraticForm q = zero(m);
        for (std::size_t j = 0; j < m; ++j) q.coeffs[j * m + j] = 1.0;
        return q;
    }

    double operator()(std::span<const double> x) const;
};

// Midpoint-concavity check of h(x) = ln(1 + q(x)) - q(x) on random segments.
// Returns violations beyond tolerance 1e-9; 0 whenever q is PSD.
int check_lemma_concavity(const QuadraticForm& q, int trials, std::uint64_t seed);

}  // namespace permlc
