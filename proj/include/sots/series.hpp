#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "sots/arith.hpp"
#include "sots/common.hpp"
#include "sots/local.hpp"
#include "sots/rational.hpp"

namespace sots {

// Landau-Ramanujan constant, the leading constant of N(x) ~ C x / sqrt(log x).
// Digits beyond the sixth come from evaluating the defining product at a
// large cutoff; landau_ramanujan() below cross-checks them.
constexpr long double landau_ramanujan_constant = 0.7642236535892206L;

namespace detail {

class prime_cache {
public:
    static const std::vector<std::uint32_t>& get(std::uint32_t limit) {
        static prime_cache instance;
        std::lock_guard<std::mutex> lock(instance.mutex_);
        if (limit > instance.limit_) {
            instance.primes_ = primes_upto(limit);
            instance.limit_ = limit;
        }
        return instance.primes_;
    }

private:
    std::mutex mutex_;
    std::uint32_t limit_ = 0;
    std::vector<std::uint32_t> primes_;
};

} // namespace detail

// Truncated-product value with a rigorous bound on the omitted tail.
struct truncated_value {
    long double value = 0;
    long double tail_bound = 0;
    std::uint64_t cutoff = 0;
};

// C = 2^{-1/2} prod_{p = 3 mod 4} (1 - p^{-2})^{-1/2}, truncated at P.
// The true constant lies in [value, value + tail_bound]; the tail uses
// sum_{n > P} n^{-2} <= 1/P.
inline truncated_value landau_ramanujan(std::uint64_t P) {
    if (P < 3) throw domain_error("landau_ramanujan: P must be >= 3");
    const auto& primes = detail::prime_cache::get(std::uint32_t(P));
    long double prod = 1.0L;
    for (std::uint32_t p : primes) {
        if (p > P) break;
        if (p % 4 == 3) prod *= 1.0L - 1.0L / ((long double)p * p);
    }
    truncated_value out;
    out.value = 1.0L / std::sqrt(2.0L * prod);
    long double inv_p2 = 1.0L / ((long double)P * P);
    long double tail_log = 0.5L / (1.0L - inv_p2) / (long double)P;
    out.tail_bound = out.value * std::expm1(tail_log);
    out.cutoff = P;
    return out;
}

// The p-independent-of-h local factor delta_z(p)^{-k} delta_h(p) for
// p = 3 mod 4 not dividing det(h): (1 + 1/p)^{k-1} (1 - (k-1)/p).
inline rational generic_factor(std::uint64_t p, unsigned k) {
    if (p % 4 != 3) throw domain_error("generic_factor: p must be 3 mod 4");
    rational f = rational_pow(rational(bigint(p + 1), bigint(p)), int(k) - 1);
    return f * rational(bigint(std::int64_t(p) - std::int64_t(k) + 1), bigint(p));
}

namespace detail {

// prod over p = 3 mod 4, k <= p <= P of the generic factor, plus a rigorous
// log-bound for the omitted p > P part. Primes below k always divide det(h)
// and are handled exactly elsewhere, so they never enter this product.
// Cached: the average-of-singular-series scans hit it constantly.
inline std::pair<long double, long double> generic_product(unsigned k, std::uint64_t P) {
    static std::mutex mutex;
    static std::map<std::pair<unsigned, std::uint64_t>, std::pair<long double, long double>> cache;
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find({k, P});
        if (it != cache.end()) return it->second;
    }
    const auto& primes = prime_cache::get(std::uint32_t(P));
    long double prod = 1.0L;
    for (std::uint32_t p : primes) {
        if (p > P) break;
        if (p % 4 != 3 || p < k) continue;
        long double lp = (long double)p;
        long double f = std::pow(1.0L + 1.0L / lp, (long double)(k - 1)) * (1.0L - (k - 1) / lp);
        prod *= f;
    }
    long double km1 = (long double)(k - 1);
    long double tail_log =
        k == 1 ? 0.0L : km1 * km1 / (1.0L - km1 * km1 / ((long double)P * P)) / (long double)P;
    auto result = std::make_pair(prod, tail_log);
    std::lock_guard<std::mutex> lock(mutex);
    cache[{k, P}] = result;
    return result;
}

} // namespace detail

inline constexpr std::uint64_t default_cutoff = 10'000'000ull;

struct singular_series_value {
    long double value = 0;
    long double tail_bound = 0;
    std::uint64_t cutoff = 0;
    // p = 2 and the p = 3 mod 4 divisors of det(h), with the exact factor
    // delta_z(p)^{-k} delta_h(p) for each.
    std::vector<std::pair<std::uint64_t, rational>> local_factors;
    bool admissible = false;
};

// S_h = prod_{p != 1 mod 4} delta_h(p) / delta_z(p)^k, split into exact
// exceptional factors (p = 2 and p | det(h)) and the closed-form generic
// product truncated at P. Exactly zero iff h is inadmissible.
inline singular_series_value singular_series(const offset_set& h,
                                             std::uint64_t P = default_cutoff) {
    unsigned k = unsigned(h.k());
    singular_series_value out;
    out.cutoff = P;

    offset_set hn = h.normalized();
    auto exceptional = hn.difference_primes_3mod4();
    if (!exceptional.empty() && exceptional.back() > P)
        throw domain_error("singular_series: exceptional prime " +
                           std::to_string(exceptional.back()) + " exceeds cutoff " +
                           std::to_string(P));
    if (P < 3) throw domain_error("singular_series: cutoff must be >= 3");

    rational f2 = rational_pow(rational(2), int(k)) * delta(hn, 2).value;
    out.local_factors.emplace_back(2, f2);
    rational exact_part = f2;
    for (std::uint64_t p : exceptional) {
        rational fp = rational_pow(rational(bigint(p + 1), bigint(p)), int(k)) * delta(hn, p).value;
        out.local_factors.emplace_back(p, fp);
        exact_part *= fp;
    }
    out.admissible = exact_part > 0;
    if (!out.admissible) return out; // value and tail are exactly zero

    auto [gp, tail_log] = detail::generic_product(k, P);
    // Exceptional primes >= k sit inside the cached product; divide them out.
    for (std::uint64_t p : exceptional)
        if (p >= k) gp /= to_long_double(generic_factor(p, k));

    out.value = to_long_double(exact_part) * gp;
    out.tail_bound = out.value * std::expm1(tail_log);
    return out;
}

// Admissibility is a finite computation: delta_h(2) > 0 and delta_h(p) > 0
// for the p = 3 mod 4 dividing det(h); all other local factors are positive.
inline bool is_admissible(const offset_set& h) {
    offset_set hn = h.normalized();
    if (delta(hn, 2).value == 0) return false;
    for (std::uint64_t p : hn.difference_primes_3mod4())
        if (delta(hn, p).value == 0) return false;
    return true;
}

// Partial sum 1 + sum_{d in D, d <= limit} eps_h(d) of the series expansion
// of S_h, where D holds the integers 2^a * m with a = 0 or a >= 2 and m a
// product of primes 3 mod 4 to odd powers. Diagnostic companion to
// singular_series: the partial sums approach it as the limit grows.
inline long double series_expansion_partial(const offset_set& h, std::uint64_t limit) {
    unsigned k = unsigned(h.k());
    std::map<std::pair<std::uint64_t, unsigned>, rational> eps_cache;
    auto eps_pa = [&](std::uint64_t p, unsigned a) -> const rational& {
        auto key = std::make_pair(p, a);
        auto it = eps_cache.find(key);
        if (it == eps_cache.end()) it = eps_cache.emplace(key, epsilon(h, p, a, k)).first;
        return it->second;
    };

    std::vector<std::uint64_t> odd_primes;
    for (std::uint32_t p : detail::prime_cache::get(std::uint32_t(std::min<std::uint64_t>(
             limit, std::numeric_limits<std::uint32_t>::max()))))
        if (p % 4 == 3 && p <= limit) odd_primes.push_back(p);

    long double total = 1.0L;
    // DFS over the odd part (odd exponents only), then attach 2^a, a = 0 or >= 2.
    auto rec = [&](auto&& self, std::size_t idx, std::uint64_t n, const rational& eps) -> void {
        // n itself is a valid odd part (n = 1 included).
        for (std::uint64_t two = 1;; two *= 2) {
            std::uint64_t d = n * two;
            if (d > limit) break;
            if (two == 2) continue; // nu_2(d) = 1 never occurs in D
            unsigned a = 0;
            for (std::uint64_t t = two; t > 1; t >>= 1) ++a;
            rational term = eps;
            if (a > 0) term *= eps_pa(2, a);
            if (n > 1 || a > 0) total += to_long_double(term);
        }
        for (std::size_t i = idx; i < odd_primes.size(); ++i) {
            std::uint64_t p = odd_primes[i];
            if (n > limit / p) break;
            std::uint64_t pw = p;
            unsigned a = 1;
            while (n <= limit / pw) {
                self(self, i + 1, n * pw, eps * eps_pa(p, a));
                if (pw > limit / (p * p)) break;
                pw *= p * p; // odd exponents only
                a += 2;
            }
        }
    };
    rational one = 1;
    rec(rec, 0, 1, one);
    return total;
}

} // namespace sots
