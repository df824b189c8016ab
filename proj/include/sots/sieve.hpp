#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "sots/arith.hpp"
#include "sots/bitvec.hpp"
#include "sots/common.hpp"

namespace sots {

// Worker count for segment-parallel sieving. SOTS_THREADS=1 forces a fully
// serial run; the output is identical either way since segments are disjoint.
inline unsigned worker_count() {
    if (const char* env = std::getenv("SOTS_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return unsigned(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Membership bitmap for the set of sums of two squares on [start, start+length).
// Immutable after construction; bit i <=> start+i is a sum of two squares.
struct sieve_window {
    std::uint64_t start = 0;
    std::uint64_t length = 0;
    bit_vector bits;

    std::uint64_t end() const { return start + length; }
    bool contains(std::uint64_t n) const { return n >= start && n < end(); }
    bool test(std::uint64_t n) const { return bits.test(n - start); }

    // Smallest member >= n, or end() if none in range.
    std::uint64_t next_element(std::uint64_t n) const {
        std::uint64_t i = n <= start ? 0 : n - start;
        std::uint64_t j = bits.next_set(i);
        return j == bits.size() ? end() : start + j;
    }

    template <typename Fn>
    void for_each_element(Fn&& fn) const {
        for (std::uint64_t i = bits.next_set(0); i < bits.size(); i = bits.next_set(i + 1))
            fn(start + i);
    }

    std::vector<std::uint64_t> elements() const {
        std::vector<std::uint64_t> out;
        for_each_element([&](std::uint64_t s) { out.push_back(s); });
        return out;
    }
};

namespace detail {

// Mark a^2+b^2 for all representations landing in [lo, hi) of the window.
// Bounds use exact integer square roots throughout.
inline void mark_segment(sieve_window& w, std::uint64_t lo, std::uint64_t hi) {
    std::uint64_t seg_lo = w.start + lo, seg_hi = w.start + hi;
    std::uint64_t amax = isqrt(seg_hi - 1);
    for (std::uint64_t a = 0; a <= amax; ++a) {
        std::uint64_t a2 = a * a;
        if (a2 >= seg_hi) break;
        std::uint64_t b = a;
        if (a2 + b * b < seg_lo) {
            std::uint64_t v = seg_lo - a2;
            std::uint64_t r = isqrt(v);
            b = (r * r == v) ? r : r + 1;
        }
        std::uint64_t n = a2 + b * b;
        while (n < seg_hi) {
            w.bits.set(n - w.start);
            n += 2 * b + 1;
            ++b;
        }
    }
}

inline void mark_window(sieve_window& w) {
    std::uint64_t seg = config::segment_bits;
    std::uint64_t nseg = (w.length + seg - 1) / seg;
    unsigned workers = std::min<std::uint64_t>(worker_count(), nseg);
    if (workers <= 1) {
        for (std::uint64_t s = 0; s < nseg; ++s)
            mark_segment(w, s * seg, std::min(w.length, (s + 1) * seg));
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&w, t, workers, seg, nseg] {
            for (std::uint64_t s = t; s < nseg; s += workers)
                mark_segment(w, s * seg, std::min(w.length, (s + 1) * seg));
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace detail

// Dense membership sieve for [0, x].
inline sieve_window sieve_upto(std::uint64_t x) {
    if (x + 1 > config::sieve_budget)
        throw budget_error("sieve_upto: x=" + std::to_string(x) + " exceeds the memory budget");
    sieve_window w;
    w.start = 0;
    w.length = x + 1;
    w.bits = bit_vector(w.length);
    detail::mark_window(w);
    return w;
}

// Membership sieve for a far window [X, X+W).
inline sieve_window window_sieve(std::uint64_t X, std::uint64_t W) {
    if (W == 0) throw domain_error("window_sieve: W must be positive");
    if (isqrt(X + W - 1) > config::window_iteration_budget)
        throw budget_error("window_sieve: sqrt(X+W) exceeds the iteration budget");
    sieve_window w;
    w.start = X;
    w.length = W;
    w.bits = bit_vector(W);
    detail::mark_window(w);
    return w;
}

// N(x): number of sums of two squares in [1, x]. Zero is a member of the set
// but is never counted here; the table conventions below rely on that.
inline std::uint64_t count(const sieve_window& w, std::uint64_t x) {
    if (w.start > 1) throw domain_error("count: window does not cover [1, x]");
    if (!w.contains(x) && !(x == 0 && w.length > 0))
        throw domain_error("count: x outside window range");
    if (x == 0) return 0;
    std::uint64_t lo = w.start == 0 ? 1 : 0;
    return w.bits.popcount_range(lo, x - w.start + 1);
}

// R_1(x) = N(x)/x.
inline double level_density(const sieve_window& w, std::uint64_t x) {
    if (x < 1) throw domain_error("level_density: x must be >= 1");
    return double(count(w, x)) / double(x);
}

// Isolated membership test: trial division by odd primes up to the cube
// root, then classification of the cofactor (1, prime, square, or a
// semiprime split by Pollard rho). Throws unclassified_error if the
// cofactor resists splitting rather than guessing.
inline bool is_sots(std::uint64_t n) {
    if (n == 0) return true;
    while ((n & 1) == 0) n >>= 1;
    for (std::uint64_t p = 3; p * p * p <= n; p += 2) {
        if (n % p) continue;
        unsigned e = 0;
        while (n % p == 0) n /= p, ++e;
        if ((p & 3) == 3 && (e & 1)) return false;
    }
    if (n == 1) return true;
    // Any remaining odd cofactor has at most two prime factors.
    if ((n & 3) == 3) return false; // forces an odd exponent on some p = 3 mod 4
    if (is_perfect_square(n)) return true;
    if (is_prime(n)) return true; // n = 1 mod 4 here
    std::uint64_t d = 0;
    for (std::uint64_t c = 1; c <= 40 && !d; ++c) d = detail::pollard_rho(n, c, 1u << 22);
    if (!d) throw unclassified_error("is_sots: cannot classify cofactor " + std::to_string(n));
    return (d & 3) == 1; // p*q = 1 mod 4, so both factors share a class
}

// Window dump format: one header line, then the raw bitmap, 8 bits per byte,
// least significant bit first.
inline void dump_window(const sieve_window& w, std::ostream& os) {
    os << "sots-window v1 start=" << w.start << " length=" << w.length << "\n";
    std::uint64_t nbytes = (w.length + 7) / 8;
    for (std::uint64_t j = 0; j < nbytes; ++j) {
        unsigned char byte = (w.bits.words()[j >> 3] >> (8 * (j & 7))) & 0xFF;
        os.put(char(byte));
    }
}

inline sieve_window load_window(std::istream& is) {
    std::string header;
    std::getline(is, header);
    std::uint64_t start = 0, length = 0;
    if (std::sscanf(header.c_str(), "sots-window v1 start=%llu length=%llu",
                    (unsigned long long*)&start, (unsigned long long*)&length) != 2)
        throw domain_error("load_window: bad header: " + header);
    sieve_window w;
    w.start = start;
    w.length = length;
    w.bits = bit_vector(length);
    std::uint64_t nbytes = (length + 7) / 8;
    std::vector<char> buf(nbytes);
    is.read(buf.data(), std::streamsize(nbytes));
    if (std::uint64_t(is.gcount()) != nbytes) throw domain_error("load_window: truncated bitmap");
    for (std::uint64_t j = 0; j < nbytes; ++j)
        w.bits.words()[j >> 3] |= std::uint64_t(static_cast<unsigned char>(buf[j])) << (8 * (j & 7));
    return w;
}

} // namespace sots
