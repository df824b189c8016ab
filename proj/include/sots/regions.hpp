#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "sots/common.hpp"

namespace sots {

// Chain-constraint region in the open simplex 0 < x_1 < ... < x_k:
// the coordinates at the partial sums I_j = i_1 + ... + i_j satisfy
// x_{I_j} - x_{I_{j-1}} <= lambda_j (x_0 = 0). parts = (k) with a single
// lambda gives the box chain 0 < x_1 < ... < x_k <= lambda.
struct region {
    std::vector<unsigned> parts;   // i_1, ..., i_r (each >= 1)
    std::vector<double> lambdas;   // lambda_1, ..., lambda_r (each > 0)

    region(std::vector<unsigned> i, std::vector<double> l)
        : parts(std::move(i)), lambdas(std::move(l)) {
        if (parts.empty() || parts.size() != lambdas.size())
            throw domain_error("region: parts and lambdas must be nonempty and equal length");
        for (unsigned ij : parts)
            if (ij < 1) throw domain_error("region: parts must be positive");
        for (double lj : lambdas)
            if (!(lj > 0)) throw domain_error("region: lambdas must be positive");
    }

    static region box(unsigned k, double lambda) { return region({k}, {lambda}); }

    unsigned dimension() const {
        return std::accumulate(parts.begin(), parts.end(), 0u);
    }

    // vol = lambda_1^{i_1} ... lambda_r^{i_r} / (i_1! ... i_r!)
    long double volume() const {
        long double v = 1;
        for (std::size_t j = 0; j < parts.size(); ++j) {
            for (unsigned t = 1; t <= parts[j]; ++t)
                v *= (long double)lambdas[j] / t;
        }
        return v;
    }
};

// Integer points of the dilation y*region: strictly increasing tuples
// 0 < h_1 < ... < h_k with h_{I_j} - h_{I_{j-1}} <= y*lambda_j. The "<="
// at block ends is inclusive, "0 < x_1" strict.
template <typename Fn>
void for_each_lattice_point(const region& reg, double y, Fn&& fn) {
    if (!(y >= 1)) throw domain_error("for_each_lattice_point: y must be >= 1");
    unsigned k = reg.dimension();
    std::vector<std::int64_t> caps(reg.parts.size());
    for (std::size_t j = 0; j < caps.size(); ++j)
        caps[j] = std::int64_t(std::floor(y * reg.lambdas[j]));
    std::vector<std::int64_t> h(k);
    std::vector<std::uint64_t> block_end(reg.parts.size());
    std::uint64_t acc = 0;
    for (std::size_t j = 0; j < reg.parts.size(); ++j) block_end[j] = acc += reg.parts[j];

    auto rec = [&](auto&& self, unsigned t, std::size_t j, std::int64_t block_base) -> void {
        if (t == k) {
            fn(const_cast<const std::vector<std::int64_t>&>(h));
            return;
        }
        // t is 0-based; the current block j ends at index block_end[j]-1.
        std::int64_t lo = t == 0 ? 1 : h[t - 1] + 1;
        std::int64_t hi = block_base + caps[j] - std::int64_t(block_end[j] - 1 - t);
        for (std::int64_t v = lo; v <= hi; ++v) {
            h[t] = v;
            bool last_of_block = (t + 1 == block_end[j]);
            self(self, t + 1, j + (last_of_block ? 1 : 0), last_of_block ? v : block_base);
        }
    };
    rec(rec, 0, 0, 0);
}

inline std::vector<std::vector<std::int64_t>> lattice_points(const region& reg, double y) {
    std::vector<std::vector<std::int64_t>> out;
    for_each_lattice_point(reg, y, [&](const std::vector<std::int64_t>& h) { out.push_back(h); });
    return out;
}

inline std::uint64_t lattice_point_count(const region& reg, double y) {
    std::uint64_t n = 0;
    for_each_lattice_point(reg, y, [&](const std::vector<std::int64_t>&) { ++n; });
    return n;
}

namespace detail {

inline unsigned __int128 binomial_i128(unsigned n, unsigned r) {
    if (r > n) return 0;
    unsigned __int128 b = 1;
    for (unsigned i = 1; i <= r; ++i) b = b * (n - r + i) / i;
    return b;
}

// rho(ell, k) = sum_j (-1)^j C(k,j) (k-j)^ell, as a signed 128-bit value.
inline __int128 surjections_i128(unsigned ell, unsigned k) {
    __int128 total = 0;
    for (unsigned j = 0; j <= k; ++j) {
        unsigned __int128 pw = 1;
        for (unsigned t = 0; t < ell; ++t) pw *= (k - j);
        __int128 term = __int128(binomial_i128(k, j)) * __int128(pw);
        total += (j % 2 == 0) ? term : -term;
    }
    return total;
}

} // namespace detail

// Number of maps from {1,...,ell} onto {1,...,k}.
inline std::uint64_t surjections(unsigned ell, unsigned k) {
    if (k < 1 || k > ell || ell > 20)
        throw domain_error("surjections: need 1 <= k <= ell <= 20");
    __int128 v = detail::surjections_i128(ell, k);
    if (v < 0 || v > __int128(std::numeric_limits<std::uint64_t>::max()))
        throw budget_error("surjections: value overflows 64 bits at ell=" + std::to_string(ell) +
                           " k=" + std::to_string(k));
    return std::uint64_t(v);
}

// ell-th moment of a Poisson(lambda) variable: sum_k rho(ell,k) lambda^k / k!.
inline long double poisson_moment(unsigned ell, double lambda) {
    if (ell > 20) throw domain_error("poisson_moment: ell must be <= 20");
    if (!(lambda > 0)) throw domain_error("poisson_moment: lambda must be positive");
    if (ell == 0) return 1.0L;
    long double total = 0;
    for (unsigned k = 1; k <= ell; ++k) {
        long double rho = (long double)detail::surjections_i128(ell, k);
        long double term = rho;
        for (unsigned t = 1; t <= k; ++t) term *= (long double)lambda / t;
        total += term;
    }
    return total;
}

} // namespace sots
