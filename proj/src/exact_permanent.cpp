#include "permlc/exact_permanent.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <vector>

#include "permlc/errors.hpp"
#include "permlc/rng.hpp"

namespace permlc {

PermanentValue permanent_definition(const ComplexMatrix& m) {
    const std::size_t n = m.size();
    if (n > 10) throw DimensionTooLarge("permanent_definition is limited to n <= 10");
    if (n == 0) return PermanentValue{Complex{1.0, 0.0}};

    std::vector<std::size_t> sigma(n);
    std::iota(sigma.begin(), sigma.end(), std::size_t{0});
    KahanSumComplex sum;
    do {
        Complex prod{1.0, 0.0};
        for (std::size_t k = 0; k < n; ++k) prod *= m(k, sigma[k]);
        sum.add(prod);
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return PermanentValue{sum.value()};
}

PermanentValue permanent_ryser(const ComplexMatrix& m) {
    const std::size_t n = m.size();
    if (n > 28) throw DimensionTooLarge("permanent_ryser is limited to n <= 28");
    if (n == 0) return PermanentValue{Complex{1.0, 0.0}};

    // per M = (-1)^n sum_{S != empty} (-1)^{|S|} prod_i (sum_{j in S} m_ij).
    // Subsets are visited in Gray-code order so each step toggles a single
    // column in the running row sums.
    std::vector<Complex> row_sum(n, Complex{0.0, 0.0});
    KahanSumComplex sum;
    std::uint64_t gray = 0;
    int popcount = 0;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t k = 1; k < total; ++k) {
        const int j = std::countr_zero(k);
        gray ^= std::uint64_t{1} << j;
        const bool added = (gray >> j) & 1u;
        popcount += added ? 1 : -1;
        if (added) {
            for (std::size_t i = 0; i < n; ++i) row_sum[i] += m(i, static_cast<std::size_t>(j));
        } else {
            for (std::size_t i = 0; i < n; ++i) row_sum[i] -= m(i, static_cast<std::size_t>(j));
        }
        Complex prod{1.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) prod *= row_sum[i];
        const bool negate = ((static_cast<int>(n) - popcount) & 1) != 0;
        sum.add(negate ? -prod : prod);
    }
    return PermanentValue{sum.value()};
}

PermanentValue subset_expansion(const HermitianMatrix& b) {
    const std::size_t n = b.size();
    if (n > 12) throw DimensionTooLarge("subset_expansion is limited to n <= 12");

    KahanSumComplex sum;
    sum.add(Complex{1.0, 0.0});  // per B_empty = 1
    std::vector<std::size_t> indices;
    indices.reserve(n);
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t mask = 1; mask < total; ++mask) {
        indices.clear();
        for (std::size_t j = 0; j < n; ++j)
            if ((mask >> j) & 1u) indices.push_back(j);
        ComplexMatrix sub(indices.size());
        for (std::size_t r = 0; r < indices.size(); ++r)
            for (std::size_t c = 0; c < indices.size(); ++c)
                sub(r, c) = b(indices[r], indices[c]);
        sum.add(permanent_ryser(sub).value);
    }
    return PermanentValue{sum.value()};
}

}  // namespace permlc
