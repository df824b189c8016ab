#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "sots/bitvec.hpp"
#include "sots/common.hpp"
#include "sots/rational.hpp"

namespace sots {

constexpr unsigned inf_valuation = std::numeric_limits<unsigned>::max();

// p-adic valuation; nu_p(0) = inf_valuation.
inline unsigned nu_p(std::int64_t n, std::uint64_t p) {
    if (n == 0) return inf_valuation;
    std::uint64_t m = n < 0 ? std::uint64_t(-(n + 1)) + 1 : std::uint64_t(n);
    unsigned v = 0;
    while (m % p == 0) m /= p, ++v;
    return v;
}

// Membership in the local set S_p of integers congruent to a sum of two
// squares modulo every power of p. For p = 2: n = 0 or n = 2^b * m with
// m = 1 mod 4. For p = 3 mod 4: n = 0 or nu_p(n) even. For p = 1 mod 4
// the set is all of Z.
inline bool in_Sp(std::int64_t n, std::uint64_t p) {
    if (p % 4 == 1) return true;
    if (n == 0) return true;
    if (p == 2) {
        int b = std::countr_zero(std::uint64_t(n < 0 ? -n : n));
        std::int64_t m = n / (std::int64_t(1) << b);
        return ((m % 4) + 4) % 4 == 1;
    }
    return nu_p(n, p) % 2 == 0;
}

// Sorted set of k >= 1 distinct integer offsets.
class offset_set {
public:
    explicit offset_set(std::vector<std::int64_t> offsets) : offsets_(std::move(offsets)) {
        std::sort(offsets_.begin(), offsets_.end());
        offsets_.erase(std::unique(offsets_.begin(), offsets_.end()), offsets_.end());
        if (offsets_.empty()) throw domain_error("offset_set: must contain at least one offset");
    }
    offset_set(std::initializer_list<std::int64_t> offsets)
        : offset_set(std::vector<std::int64_t>(offsets)) {}

    std::size_t k() const { return offsets_.size(); }
    const std::vector<std::int64_t>& values() const { return offsets_; }
    std::int64_t min() const { return offsets_.front(); }
    std::int64_t max() const { return offsets_.back(); }

    offset_set translated(std::int64_t c) const {
        std::vector<std::int64_t> v = offsets_;
        for (auto& h : v) h += c;
        return offset_set(std::move(v));
    }
    offset_set normalized() const { return translated(-offsets_.front()); }

    offset_set with_zero() const {
        std::vector<std::int64_t> v = offsets_;
        v.push_back(0);
        return offset_set(std::move(v));
    }

    // max over i != j of nu_p(h_i - h_j); zero when k = 1.
    unsigned max_difference_valuation(std::uint64_t p) const {
        unsigned best = 0;
        for (std::size_t i = 0; i < offsets_.size(); ++i)
            for (std::size_t j = i + 1; j < offsets_.size(); ++j)
                best = std::max(best, nu_p(offsets_[j] - offsets_[i], p));
        return best;
    }

    // Ascending primes of the given residue class mod 4 dividing some
    // difference h_j - h_i, i.e. dividing det(h). det itself is never formed.
    std::vector<std::uint64_t> difference_primes_3mod4() const;

    bool operator==(const offset_set& o) const = default;

private:
    std::vector<std::int64_t> offsets_;
};

// h_p: offsets h' such that h - h' lies in S_p for every h in the set.
// For p = 2 this has at most one element.
inline std::vector<std::int64_t> h_p_set(const offset_set& h, std::uint64_t p) {
    if (p % 4 == 1) return h.values();
    std::vector<std::int64_t> out;
    for (std::int64_t cand : h.values()) {
        bool ok = true;
        for (std::int64_t other : h.values())
            if (!in_Sp(other - cand, p)) {
                ok = false;
                break;
            }
        if (ok) out.push_back(cand);
    }
    return out;
}

namespace detail {

inline std::uint64_t pow_checked(std::uint64_t p, unsigned e, std::uint64_t budget,
                                 const char* who) {
    std::uint64_t m = 1;
    for (unsigned i = 0; i < e; ++i) {
        if (m > budget / p)
            throw budget_error(std::string(who) + ": modulus " + std::to_string(p) + "^" +
                               std::to_string(e) + " exceeds the enumeration budget");
        m *= p;
    }
    return m;
}

// Residue-level membership indicator over Z_{p^gamma}, including the
// formal levels: card 1 at gamma = 0, and for p = 2 card 2 at gamma = 1.
// For honest levels, bit b is set iff b (as an integer) lies in S_p and
// nu_p(b) stays below the level's valuation bound (gamma-1 for p = 2,
// gamma for odd p).
inline bit_vector level_indicator(std::uint64_t p, unsigned gamma) {
    if (gamma == 0) {
        bit_vector g(1);
        g.set(0);
        return g;
    }
    if (p == 2 && gamma == 1) {
        bit_vector g(2);
        g.set(0);
        g.set(1);
        return g;
    }
    std::uint64_t m = pow_checked(p, gamma, config::residue_budget, "level_indicator");
    bit_vector g(m);
    unsigned bound = p == 2 ? gamma - 1 : gamma;
    for (std::uint64_t b = 0; b < m; ++b) {
        if (b == 0) continue;
        unsigned v = nu_p(std::int64_t(b), p);
        if (v >= bound) continue;
        if (in_Sp(std::int64_t(b), p)) g.set(b);
    }
    return g;
}

// card of T_h(2^gamma) or V_h(p^gamma) at an honest or formal level,
// together with the modulus. Membership is evaluated on the actual
// integers a + h_i, which may be negative.
inline std::pair<std::uint64_t, std::uint64_t> level_card(const offset_set& h, std::uint64_t p,
                                                          unsigned gamma) {
    if (gamma == 0) return {1, 1};
    if (p == 2 && gamma == 1) return {2, 2};
    std::uint64_t m = pow_checked(p, gamma, config::residue_budget, "level_card");
    unsigned bound = p == 2 ? gamma - 1 : gamma;
    std::uint64_t card = 0;
    for (std::uint64_t a = 0; a < m; ++a) {
        bool ok = true;
        for (std::int64_t off : h.values()) {
            std::int64_t w = std::int64_t(a) + off;
            if (nu_p(w, p) >= bound || !in_Sp(w, p)) {
                ok = false;
                break;
            }
        }
        if (ok) ++card;
    }
    return {card, m};
}

} // namespace detail

// T_h(2^{alpha+1}): least residues a mod 2^{alpha+1} with a + h in S_2 and
// max nu_2(a+h) < alpha.
inline std::vector<std::uint64_t> enumerate_T(const offset_set& h, unsigned alpha) {
    if (alpha < 1) throw domain_error("enumerate_T: alpha must be >= 1");
    std::uint64_t m = detail::pow_checked(2, alpha + 1, config::residue_budget, "enumerate_T");
    std::vector<std::uint64_t> out;
    for (std::uint64_t a = 0; a < m; ++a) {
        bool ok = true;
        for (std::int64_t off : h.values()) {
            std::int64_t w = std::int64_t(a) + off;
            if (nu_p(w, 2) >= alpha || !in_Sp(w, 2)) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(a);
    }
    return out;
}

// V_h(p^alpha) for p = 3 mod 4: least residues a mod p^alpha with
// a + h in S_p and max nu_p(a+h) < alpha.
inline std::vector<std::uint64_t> enumerate_V(const offset_set& h, std::uint64_t p,
                                              unsigned alpha) {
    if (p % 4 != 3) throw domain_error("enumerate_V: p must be 3 mod 4");
    if (alpha < 1) throw domain_error("enumerate_V: alpha must be >= 1");
    std::uint64_t m = detail::pow_checked(p, alpha, config::residue_budget, "enumerate_V");
    std::vector<std::uint64_t> out;
    for (std::uint64_t a = 0; a < m; ++a) {
        bool ok = true;
        for (std::int64_t off : h.values()) {
            std::int64_t w = std::int64_t(a) + off;
            if (nu_p(w, p) >= alpha || !in_Sp(w, p)) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(a);
    }
    return out;
}

// Exact local density delta_h(p) plus the enumeration data behind it.
struct local_density {
    std::uint64_t p = 0;
    unsigned alpha = 0;          // stabilization exponent used
    std::uint64_t residue_count = 0; // card T or card V at that exponent
    std::uint64_t hp_count = 0;      // card h_p
    rational value;
};

// delta_h(p), evaluated at the stabilization exponent where the finite
// residue-set formula becomes exact: alpha = 2 + max nu_2(h_i - h_j) for
// p = 2, alpha = 1 + max nu_p(h_i - h_j) for p = 3 mod 4.
inline local_density delta(const offset_set& h, std::uint64_t p) {
    local_density d;
    d.p = p;
    if (p % 4 == 1) {
        d.hp_count = h.k();
        d.value = 1;
        return d;
    }
    offset_set hn = h.normalized(); // cardinalities are translation invariant
    d.hp_count = h_p_set(hn, p).size();
    if (p == 2) {
        d.alpha = 2 + hn.max_difference_valuation(2);
        auto T = enumerate_T(hn, d.alpha);
        d.residue_count = T.size();
        std::uint64_t m = std::uint64_t(1) << (d.alpha + 1);
        d.value = rational(bigint(d.residue_count + d.hp_count), bigint(m));
        return d;
    }
    d.alpha = 1 + hn.max_difference_valuation(p);
    auto V = enumerate_V(hn, p, d.alpha);
    d.residue_count = V.size();
    bigint pa = 1;
    for (unsigned i = 0; i < d.alpha; ++i) pa *= p;
    bigint parity = d.alpha % 2 ? p : 1; // p^(alpha mod 2)
    d.value = rational(bigint(d.residue_count) * (p + 1) * parity + bigint(d.hp_count) * p,
                       pa * (p + 1) * parity);
    return d;
}

// Local increment of the singular-series expansion:
//   eps_h(p^alpha; j) = r_z(alpha)^{-j} r_h(alpha) - r_z(alpha-1)^{-j} r_h(alpha-1),
// where r_h(gamma) is card T_h(2^gamma)/2^gamma (card V for odd p), with the
// formal levels r(0) = 1 and, for p = 2, r(1) = 1. In particular
// eps_h(2) = 0 for every h.
inline rational epsilon(const offset_set& h, std::uint64_t p, unsigned alpha, unsigned j) {
    if (p % 4 == 1) throw domain_error("epsilon: p must not be 1 mod 4");
    if (alpha < 1 || j < 1) throw domain_error("epsilon: alpha and j must be >= 1");
    offset_set z{0};
    auto [ch_hi, m_hi] = detail::level_card(h, p, alpha);
    auto [cz_hi, mz_hi] = detail::level_card(z, p, alpha);
    auto [ch_lo, m_lo] = detail::level_card(h, p, alpha - 1);
    auto [cz_lo, mz_lo] = detail::level_card(z, p, alpha - 1);
    rational hi = rational_pow(rational(bigint(cz_hi), bigint(mz_hi)), int(j));
    rational lo = rational_pow(rational(bigint(cz_lo), bigint(mz_lo)), int(j));
    return rational(bigint(ch_hi), bigint(m_hi)) / hi - rational(bigint(ch_lo), bigint(m_lo)) / lo;
}

inline rational epsilon(const offset_set& h, std::uint64_t p, unsigned alpha) {
    return epsilon(h, p, alpha, unsigned(h.k()));
}

// Exact sum of eps_{o u h}(p^alpha; card o + k) over all k-tuples
// (h_1,...,h_k) in Z_{p^alpha}^k, with o = {} or {0}. The tuple components
// may coincide; the exponent j stays card o + k. Uses per-residue indicator
// bitmaps, one rotation per shift, so each tuple costs a few word ANDs.
struct cancellation_report {
    rational sum;
    std::uint64_t tuples = 0;
};

inline cancellation_report cancellation_sum(bool with_zero, std::uint64_t p, unsigned alpha,
                                            unsigned k) {
    if (p % 4 == 1) throw domain_error("cancellation_sum: p must not be 1 mod 4");
    if (alpha < 1 || k < 1) throw domain_error("cancellation_sum: alpha and k must be >= 1");
    std::uint64_t m_hi = detail::pow_checked(p, alpha, config::residue_budget, "cancellation_sum");
    double tuple_estimate = std::pow(double(m_hi), double(k));
    if (tuple_estimate > double(std::uint64_t(1) << 26))
        throw budget_error("cancellation_sum: tuple count exceeds the budget");

    unsigned j = k + (with_zero ? 1 : 0);
    bit_vector g_hi = detail::level_indicator(p, alpha);
    bit_vector g_lo = detail::level_indicator(p, alpha - 1);
    std::uint64_t mh = g_hi.size(), ml = g_lo.size();

    auto rotations = [](const bit_vector& g) {
        std::uint64_t m = g.size();
        std::vector<bit_vector> rot(m, bit_vector(m));
        for (std::uint64_t t = 0; t < m; ++t)
            for (std::uint64_t a = 0; a < m; ++a)
                if (g.test((a + t) % m)) rot[t].set(a);
        return rot;
    };
    auto rot_hi = rotations(g_hi);
    auto rot_lo = rotations(g_lo);

    rational rz_hi = rational(bigint(g_hi.popcount()), bigint(mh));
    rational rz_lo = rational(bigint(g_lo.popcount()), bigint(ml));
    rational scale_hi = rational(1) / (rational_pow(rz_hi, int(j)) * mh);
    rational scale_lo = rational(1) / (rational_pow(rz_lo, int(j)) * ml);

    bit_vector base_hi(mh, true), base_lo(ml, true);
    if (with_zero) {
        base_hi = g_hi;
        base_lo = g_lo;
    }

    cancellation_report rep;
    // The epsilon sum distributes over the two levels: it equals
    // scale_hi * sum of c_hi(tuple) - scale_lo * sum of c_lo(tuple),
    // evaluated in exact rational arithmetic.
    std::vector<bit_vector> stack_hi(k + 1, bit_vector()), stack_lo(k + 1, bit_vector());
    stack_hi[0] = base_hi;
    stack_lo[0] = base_lo;
    bigint total_hi = 0, total_lo = 0;
    auto descend = [&](auto&& self, unsigned depth) -> void {
        if (depth == k) {
            total_hi += stack_hi[k].popcount();
            total_lo += stack_lo[k].popcount();
            ++rep.tuples;
            return;
        }
        for (std::uint64_t t = 0; t < mh; ++t) {
            stack_hi[depth + 1] = stack_hi[depth];
            stack_lo[depth + 1] = stack_lo[depth];
            auto* whi = stack_hi[depth + 1].words();
            auto* wlo = stack_lo[depth + 1].words();
            const auto* rhi = rot_hi[t].words();
            const auto* rlo = rot_lo[t % ml].words();
            for (std::uint64_t w = 0; w < stack_hi[depth + 1].word_count(); ++w) whi[w] &= rhi[w];
            for (std::uint64_t w = 0; w < stack_lo[depth + 1].word_count(); ++w) wlo[w] &= rlo[w];
            self(self, depth + 1);
        }
    };
    descend(descend, 0);
    rep.sum = scale_hi * rational(total_hi) - scale_lo * rational(total_lo);
    return rep;
}

inline std::vector<std::uint64_t> offset_set::difference_primes_3mod4() const {
    std::vector<std::uint64_t> primes;
    for (std::size_t i = 0; i < offsets_.size(); ++i)
        for (std::size_t j = i + 1; j < offsets_.size(); ++j) {
            std::uint64_t d = std::uint64_t(offsets_[j] - offsets_[i]);
            while (d % 2 == 0) d /= 2;
            for (std::uint64_t q = 3; q * q <= d; q += 2)
                if (d % q == 0) {
                    while (d % q == 0) d /= q;
                    if (q % 4 == 3) primes.push_back(q);
                }
            // the leftover is 1 or a prime
            if (d > 1 && d % 4 == 3) primes.push_back(d);
        }
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
    return primes;
}

} // namespace sots
