#include "permlc/density.hpp"

#include <cmath>
#include <string>

#include "permlc/errors.hpp"
#include "permlc/jacobi.hpp"
#include "permlc/rng.hpp"

namespace permlc {

namespace {

constexpr double kLnPi = 1.1447298858494001741;
constexpr double kConcavityTol = 1e-9;

HermitianMatrix identity_minus(const HermitianMatrix& c) {
    ComplexMatrix q = c.matrix();
    for (std::size_t i = 0; i < q.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j) q(i, j) = -q(i, j);
    for (std::size_t j = 0; j < q.size(); ++j) q(j, j) += 1.0;
    return HermitianMatrix::symmetrized(std::move(q));
}

void require_same_dim(const DensityModel& d, const PointC& z) {
    if (d.size() != z.size())
        throw DimensionMismatch("point dimension " + std::to_string(z.size()) +
                                " does not match density dimension " + std::to_string(d.size()));
}

PointC random_point(std::size_t n, double sigma, Rng& rng) {
    PointC p = PointC::zero(n);
    for (std::size_t k = 0; k < n; ++k)
        p.z[k] = Complex{sigma * rng.normal(), sigma * rng.normal()};
    return p;
}

}  // namespace

PointC PointC::from_real(std::span<const double> xy) {
    const std::size_t n = xy.size() / 2;
    if (xy.size() != 2 * n) throw DimensionMismatch("real layout must have even length");
    PointC p = PointC::zero(n);
    for (std::size_t k = 0; k < n; ++k) p.z[k] = Complex{xy[k], xy[n + k]};
    return p;
}

std::vector<double> PointC::to_real() const {
    const std::size_t n = size();
    std::vector<double> xy(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
        xy[k] = z[k].real();
        xy[n + k] = z[k].imag();
    }
    return xy;
}

DensityModel DensityModel::from_forms(LinearFormBundle forms, double tol) {
    const std::size_t n = forms.size();
    HermitianMatrix q = identity_minus(gram_conjugate(forms));
    const SpectralDecomposition d = spectral_decompose(q);
    if (d.eigenvalues.front() < -tol) {
        throw SpectrumOutOfRange(1.0 - d.eigenvalues.front(),
                                 "density forms give a non-PSD q: min eigenvalue of I - C is " +
                                     std::to_string(d.eigenvalues.front()));
    }
    return DensityModel(std::move(forms), std::move(q), -static_cast<double>(n) * kLnPi);
}

DensityModel DensityModel::from_forms_unchecked(LinearFormBundle forms) {
    const std::size_t n = forms.size();
    HermitianMatrix q = identity_minus(gram_conjugate(forms));
    return DensityModel(std::move(forms), std::move(q), -static_cast<double>(n) * kLnPi);
}

DensityModel build_density(const HermitianMatrix& a, double tol) {
    return DensityModel::from_forms(factor_psd(split_identity(a, tol), tol), tol);
}

std::vector<Complex> eval_linear_forms(const DensityModel& d, const PointC& z) {
    require_same_dim(d, z);
    const std::size_t n = d.size();
    const ComplexMatrix& l = d.forms().rows;
    std::vector<Complex> out(n, Complex{0.0, 0.0});
    for (std::size_t j = 0; j < n; ++j) {
        Complex s{0.0, 0.0};
        for (std::size_t k = 0; k < n; ++k) s += l(j, k) * z.z[k];
        out[j] = s;
    }
    return out;
}

double log_density(const DensityModel& d, const PointC& z) {
    return log_density_scaled(d, z, 1.0);
}

double log_density_scaled(const DensityModel& d, const PointC& z, double beta) {
    require_same_dim(d, z);
    const std::vector<Complex> ell = eval_linear_forms(d, z);
    double norm2 = 0.0;
    for (const Complex& zk : z.z) norm2 += std::norm(zk);
    double sum = d.log_normalizer() - norm2;
    for (const Complex& lj : ell) sum += std::log1p(beta * std::norm(lj));
    return sum;
}

std::vector<double> grad_log_density(const DensityModel& d, const PointC& z) {
    return grad_log_density_scaled(d, z, 1.0);
}

std::vector<double> grad_log_density_scaled(const DensityModel& d, const PointC& z, double beta) {
    require_same_dim(d, z);
    const std::size_t n = d.size();
    const ComplexMatrix& l = d.forms().rows;
    const std::vector<Complex> ell = eval_linear_forms(d, z);

    // In complex form the gradient pair (d/dx_k, d/dy_k) is
    //   g_k = -2 z_k + sum_j 2 beta ell_j(z) conj(l_jk) / (1 + beta |ell_j(z)|^2),
    // with d/dx_k = Re g_k and d/dy_k = Im g_k.
    std::vector<Complex> g(n);
    for (std::size_t k = 0; k < n; ++k) g[k] = -2.0 * z.z[k];
    for (std::size_t j = 0; j < n; ++j) {
        const Complex factor = 2.0 * beta * ell[j] / (1.0 + beta * std::norm(ell[j]));
        if (factor == Complex{0.0, 0.0}) continue;
        for (std::size_t k = 0; k < n; ++k) g[k] += factor * std::conj(l(j, k));
    }

    std::vector<double> out(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = g[k].real();
        out[n + k] = g[k].imag();
    }
    return out;
}

double quadratic_q(const DensityModel& d, const PointC& z) {
    require_same_dim(d, z);
    const std::size_t n = d.size();
    const HermitianMatrix& q = d.q_matrix();
    Complex s{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s += std::conj(z.z[i]) * q(i, j) * z.z[j];
    return s.real();
}

int check_logconcavity(const DensityModel& d, int trials, std::uint64_t seed) {
    if (trials < 1) throw BadInput("check_logconcavity: trials must be >= 1");
    const std::size_t n = d.size();
    Rng rng(seed);
    int violations = 0;
    for (int t = 0; t < trials; ++t) {
        const PointC x1 = random_point(n, 1.5, rng);
        const PointC x2 = random_point(n, 1.5, rng);
        const double alpha = rng.uniform();
        PointC mid = PointC::zero(n);
        for (std::size_t k = 0; k < n; ++k)
            mid.z[k] = alpha * x1.z[k] + (1.0 - alpha) * x2.z[k];
        const double lhs = log_density(d, mid);
        const double rhs = alpha * log_density(d, x1) + (1.0 - alpha) * log_density(d, x2);
        if (lhs < rhs - kConcavityTol) ++violations;
    }
    return violations;
}

double check_q_psd(const DensityModel& d) {
    return spectral_decompose(d.q_matrix()).eigenvalues.front();
}

double QuadraticForm::operator()(std::span<const double> x) const {
    if (x.size() != dim) throw DimensionMismatch("quadratic form dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < dim; ++j) row += coeffs[i * dim + j] * x[j];
        s += x[i] * row;
    }
    return s;
}

int check_lemma_concavity(const QuadraticForm& q, int trials, std::uint64_t seed) {
    if (trials < 1) throw BadInput("check_lemma_concavity: trials must be >= 1");
    const std::size_t m = q.dim;
    Rng rng(seed);
    const auto h = [&q](std::span<const double> x) {
        const double v = q(x);
        return std::log1p(v) - v;
    };
    std::vector<double> x1(m), x2(m), mid(m);
    int violations = 0;
    for (int t = 0; t < trials; ++t) {
        for (std::size_t i = 0; i < m; ++i) {
            x1[i] = 2.0 * rng.normal();
            x2[i] = 2.0 * rng.normal();
            mid[i] = 0.5 * (x1[i] + x2[i]);
        }
        const double lhs = h(mid);
        const double rhs = 0.5 * (h(x1) + h(x2));
        if (lhs < rhs - kConcavityTol) ++violations;
    }
    return violations;
}

}  // namespace permlc
