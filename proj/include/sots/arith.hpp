#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "sots/bitvec.hpp"
#include "sots/common.hpp"

namespace sots {

// Exact integer square root; no floating point leaks into callers' index math.
inline std::uint64_t isqrt(std::uint64_t n) {
    if (n == 0) return 0;
    auto r = std::uint64_t(std::sqrt(double(n)));
    while (r > 0 && r > n / r) --r;
    while ((r + 1) <= n / (r + 1)) ++r;
    return r;
}

inline bool is_perfect_square(std::uint64_t n) {
    std::uint64_t r = isqrt(n);
    return r * r == n;
}

namespace detail {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return std::uint64_t((unsigned __int128)a * b % m);
}

inline std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

} // namespace detail

// Deterministic Miller-Rabin for the full 64-bit range.
inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = std::countr_zero(d);
    d >>= s;
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = detail::powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = detail::mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

namespace detail {

// Brent-cycle Pollard rho; n must be odd composite. Returns a nontrivial
// factor or 0 if the iteration cap is hit.
inline std::uint64_t pollard_rho(std::uint64_t n, std::uint64_t c, std::uint64_t max_iter) {
    std::uint64_t x = 2, y = 2, d = 1;
    std::uint64_t iter = 0;
    auto f = [&](std::uint64_t v) { return (mulmod(v, v, n) + c) % n; };
    while (d == 1) {
        if (++iter > max_iter) return 0;
        x = f(x);
        y = f(f(y));
        std::uint64_t diff = x > y ? x - y : y - x;
        if (diff == 0) return 0;
        d = std::gcd(diff, n);
    }
    return d == n ? 0 : d;
}

} // namespace detail

// Prime factorization of n <= 2^63-1 as (prime, exponent) pairs, ascending.
inline std::vector<std::pair<std::uint64_t, unsigned>> factorize(std::uint64_t n) {
    std::vector<std::pair<std::uint64_t, unsigned>> out;
    if (n < 2) return out;
    for (std::uint64_t p : {2ull, 3ull, 5ull}) {
        if (n % p == 0) {
            unsigned e = 0;
            while (n % p == 0) n /= p, ++e;
            out.emplace_back(p, e);
        }
    }
    // wheel over 7, 11, 13, ... up to a fixed trial bound
    for (std::uint64_t p = 7; p <= 1'000'000 && p * p <= n; p += 2) {
        if (n % p == 0) {
            unsigned e = 0;
            while (n % p == 0) n /= p, ++e;
            out.emplace_back(p, e);
        }
    }
    // cofactor: 1, prime, or a product of at most a few large primes
    std::vector<std::uint64_t> stack;
    if (n > 1) stack.push_back(n);
    while (!stack.empty()) {
        std::uint64_t m = stack.back();
        stack.pop_back();
        if (is_prime(m)) {
            auto it = std::find_if(out.begin(), out.end(), [&](auto& pe) { return pe.first == m; });
            if (it != out.end())
                ++it->second;
            else
                out.emplace_back(m, 1);
            continue;
        }
        if (is_perfect_square(m)) {
            std::uint64_t r = isqrt(m);
            stack.push_back(r);
            stack.push_back(r);
            continue;
        }
        std::uint64_t d = 0;
        for (std::uint64_t c = 1; c <= 40 && !d; ++c) d = detail::pollard_rho(m, c, 1u << 22);
        if (!d) throw unclassified_error("factorize: could not split cofactor " + std::to_string(m));
        stack.push_back(d);
        stack.push_back(m / d);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// All primes <= limit, via an odds-only Eratosthenes sieve.
inline std::vector<std::uint32_t> primes_upto(std::uint32_t limit) {
    std::vector<std::uint32_t> primes;
    if (limit < 2) return primes;
    primes.push_back(2);
    std::uint64_t half = (std::uint64_t(limit) - 1) / 2; // odd candidates 3,5,...,<=limit
    bit_vector composite(half + 1);                      // index i <-> 2i+1
    for (std::uint64_t i = 1; (2 * i + 1) * (2 * i + 1) <= limit; ++i) {
        if (composite.test(i)) continue;
        std::uint64_t p = 2 * i + 1;
        for (std::uint64_t j = (p * p - 1) / 2; j <= half; j += p) composite.set(j);
    }
    for (std::uint64_t i = 1; i <= half; ++i)
        if (!composite.test(i)) primes.push_back(std::uint32_t(2 * i + 1));
    return primes;
}

} // namespace sots
