#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sots/common.hpp"
#include "sots/local.hpp"
#include "sots/regions.hpp"
#include "sots/series.hpp"
#include "sots/sieve.hpp"

namespace sots {

namespace detail {

// sum over 0 <= n <= x of prod_i 1_S(n + h_i), by shifted word AND scans.
// The sum starts at n = 0: that convention reproduces the published pair
// and triple counts exactly. Terms with any n + h_i < 0 vanish; the window
// must cover the rest.
inline std::uint64_t tuple_count(const sieve_window& w, const std::vector<std::int64_t>& offsets,
                                 std::uint64_t x) {
    std::int64_t h_min = offsets.front(), h_max = offsets.back();
    std::int64_t m_lo = std::max<std::int64_t>(h_min, 0);
    std::int64_t m_hi = std::int64_t(x) + h_min;
    if (m_hi < m_lo) return 0;
    if (std::int64_t(w.start) > m_lo || w.end() < std::uint64_t(m_hi + (h_max - h_min)) + 1)
        throw coverage_error("tuple_count: window [" + std::to_string(w.start) + "," +
                             std::to_string(w.end()) + ") does not cover the scan");
    std::uint64_t q_lo = std::uint64_t(m_lo) - w.start;
    std::uint64_t q_hi = std::uint64_t(m_hi) - w.start;
    std::vector<std::uint64_t> shifts;
    shifts.reserve(offsets.size());
    for (std::int64_t h : offsets) shifts.push_back(std::uint64_t(h - h_min));

    std::uint64_t total = 0;
    for (std::uint64_t wq = q_lo >> 6; wq <= (q_hi >> 6); ++wq) {
        std::uint64_t acc = ~std::uint64_t(0);
        for (std::uint64_t s : shifts) acc &= w.bits.word_shifted(wq, s);
        std::uint64_t base = wq << 6;
        if (base < q_lo) acc &= ~std::uint64_t(0) << (q_lo - base);
        if (base + 63 > q_hi) acc &= ~std::uint64_t(0) >> (base + 63 - q_hi);
        total += std::uint64_t(std::popcount(acc));
    }
    return total;
}

} // namespace detail

// k-tuple correlation R_k(h; x) with the singular-series prediction.
struct correlation_report {
    std::vector<std::int64_t> offsets;
    std::uint64_t x = 0;
    std::uint64_t count = 0;          // sum over n <= x of prod 1_S(n+h_i)
    long double r_k = 0;              // count / x
    long double sss = 0;              // S_h at the cutoff used
    long double prediction = 0;       // S_h * R_1(x)^k (a density)
    long double predicted_count = 0;  // x * prediction
    long double ratio = 0;            // count / predicted_count
    long double error_term = 0;       // E_h(x) = r_k / R_1(x)^k - S_h
};

// Cutoff for the table predictions. The published tables evaluated the
// singular series near this truncation; reproducing their prediction
// column to the printed precision requires matching it.
inline constexpr std::uint64_t table_cutoff = 100'000ull;

inline correlation_report correlation(const offset_set& h, std::uint64_t x,
                                      const sieve_window& w,
                                      std::uint64_t cutoff = table_cutoff) {
    correlation_report rep;
    rep.offsets = h.values();
    rep.x = x;
    rep.count = detail::tuple_count(w, h.values(), x);
    rep.r_k = (long double)rep.count / x;
    rep.sss = singular_series(h, cutoff).value;
    long double r1 = (long double)count(w, x) / x;
    long double r1k = std::pow(r1, (long double)h.k());
    rep.prediction = rep.sss * r1k;
    rep.predicted_count = x * rep.prediction;
    rep.ratio = rep.predicted_count > 0 ? rep.count / rep.predicted_count : 0;
    rep.error_term = rep.r_k / r1k - rep.sss;
    return rep;
}

struct table_row {
    std::uint64_t x = 0;
    std::uint64_t count = 0;
    long double prediction = 0; // x * S_h * R_1(x)^k
    long double ratio = 0;      // count / prediction
};

inline std::vector<table_row> table_rows(const offset_set& h,
                                         const std::vector<std::uint64_t>& xs,
                                         const sieve_window& w,
                                         std::uint64_t cutoff = table_cutoff) {
    std::vector<table_row> rows;
    for (std::uint64_t x : xs) {
        auto rep = correlation(h, x, w, cutoff);
        rows.push_back({x, rep.count, rep.predicted_count, rep.ratio});
    }
    return rows;
}

// Averaged error term of the k-tuple conjecture over the dilated region:
// lhs = |sum of E_{o u h}(x)|, rhs = sum of S_{o u h}, over y*C cap Z^k.
struct averaged_error_report {
    long double lhs = 0;
    long double rhs = 0;
    long double ratio = 0;
    std::uint64_t points = 0;
};

inline averaged_error_report averaged_error(const region& reg, bool with_zero, std::uint64_t x,
                                            double y, const sieve_window& w,
                                            std::uint64_t cutoff = default_cutoff) {
    long double r1 = (long double)count(w, x) / x;
    if (std::fabs((long double)y * r1 - 1.0L) > 0.01L)
        throw domain_error("averaged_error: y*R_1(x) must be within 1% of 1");
    averaged_error_report rep;
    long double signed_sum = 0;
    for_each_lattice_point(reg, y, [&](const std::vector<std::int64_t>& hv) {
        std::vector<std::int64_t> v = hv;
        if (with_zero) v.push_back(0);
        offset_set oh(std::move(v));
        long double sss = singular_series(oh, cutoff).value;
        std::uint64_t c = detail::tuple_count(w, oh.values(), x);
        long double r1k = std::pow(r1, (long double)oh.k());
        signed_sum += ((long double)c / x) / r1k - sss;
        rep.rhs += sss;
        ++rep.points;
    });
    rep.lhs = std::fabs(signed_sum);
    rep.ratio = rep.rhs > 0 ? rep.lhs / rep.rhs : 0;
    return rep;
}

// Nearest-neighbor gaps of the window's elements, rescaled to mean one.
struct spacing_histogram {
    std::uint64_t window_start = 0;
    std::uint64_t window_length = 0;
    std::uint64_t element_count = 0;
    std::uint64_t gap_count = 0;
    double mean_gap = 0;
    std::vector<double> edges;  // bins+1 edges, from 0 to the largest rescaled gap
    std::vector<double> masses; // masses sum to one
    std::vector<double> exp_reference; // integral of e^-t over each bin
    double sup_cdf_distance = 0;       // sup |empirical CDF - (1 - e^-t)|
};

inline spacing_histogram spacing(const sieve_window& w, unsigned bins,
                                 std::uint64_t min_elements = 1000) {
    if (bins < 1) throw domain_error("spacing: bins must be >= 1");
    std::vector<std::uint64_t> gaps;
    std::uint64_t prev = 0, n_elem = 0;
    bool have_prev = false;
    w.for_each_element([&](std::uint64_t s) {
        ++n_elem;
        if (have_prev) gaps.push_back(s - prev);
        prev = s;
        have_prev = true;
    });
    if (n_elem < std::max<std::uint64_t>(min_elements, 2))
        throw coverage_error("spacing: window holds too few elements (" +
                             std::to_string(n_elem) + ")");
    spacing_histogram out;
    out.window_start = w.start;
    out.window_length = w.length;
    out.element_count = n_elem;
    out.gap_count = gaps.size();
    long double total = 0;
    for (auto g : gaps) total += g;
    out.mean_gap = double(total / gaps.size());

    std::vector<double> rescaled(gaps.size());
    for (std::size_t i = 0; i < gaps.size(); ++i) rescaled[i] = double(gaps[i]) / out.mean_gap;
    std::sort(rescaled.begin(), rescaled.end());

    double n = double(rescaled.size());
    double sup = 0;
    for (std::size_t i = 0; i < rescaled.size(); ++i) {
        double F = 1.0 - std::exp(-rescaled[i]);
        sup = std::max(sup, std::fabs(F - double(i) / n));
        sup = std::max(sup, std::fabs(double(i + 1) / n - F));
    }
    out.sup_cdf_distance = sup;

    double hi = rescaled.back();
    out.edges.resize(bins + 1);
    for (unsigned b = 0; b <= bins; ++b) out.edges[b] = hi * double(b) / bins;
    out.masses.assign(bins, 0);
    for (double g : rescaled) {
        auto b = std::min<std::size_t>(bins - 1, std::size_t(g / hi * bins));
        out.masses[b] += 1;
    }
    for (auto& m : out.masses) m /= n;
    out.exp_reference.resize(bins);
    for (unsigned b = 0; b < bins; ++b)
        out.exp_reference[b] = std::exp(-out.edges[b]) - std::exp(-out.edges[b + 1]);
    return out;
}

namespace detail {

// #{s_n <= x : the r following gaps satisfy s_{n+j} - s_{n+j-1} <= cutoff_j}.
// Levels start at the window's first element (0 counts as a level when the
// window starts at 0, matching the tuple-count convention; the sandwich
// bounds need the two to agree exactly). The window must extend to
// x + sum of cutoffs so every candidate is decidable.
inline std::uint64_t gap_run_count(const sieve_window& w, std::uint64_t x,
                                   const std::vector<std::uint64_t>& cutoffs) {
    if (cutoffs.empty()) throw domain_error("gap_run_count: need at least one cutoff");
    std::uint64_t reach = x;
    for (auto c : cutoffs) reach += c;
    if (w.start > 1 || w.end() < reach + 1)
        throw coverage_error("gap_run_count: window must cover [1, x + sum of cutoffs]");
    std::size_t r = cutoffs.size();
    std::vector<std::uint64_t> ring; // elements s_n, s_{n+1}, ..., s_{n+r}
    std::uint64_t total = 0;
    std::uint64_t s = w.next_element(w.start);
    while (s < w.end()) {
        ring.push_back(s);
        if (ring.size() == r + 1) {
            if (ring.front() <= x) {
                bool ok = true;
                for (std::size_t j = 0; j < r; ++j)
                    if (ring[j + 1] - ring[j] > cutoffs[j]) {
                        ok = false;
                        break;
                    }
                total += ok;
            }
            ring.erase(ring.begin());
        }
        if (ring.front() > x) break;
        s = w.next_element(s + 1);
    }
    // Elements <= x whose successor runs leave the window: every such run
    // breaches some cutoff because the window reaches past x + sum cutoffs.
    return total;
}

} // namespace detail

// Fraction of levels s_n <= x whose next r gaps are all below lambda_j * y;
// Poisson predicts prod_j (1 - e^{-lambda_j}).
inline double joint_gap_statistic(const std::vector<double>& lambdas, std::uint64_t x, double y,
                                  const sieve_window& w) {
    std::vector<std::uint64_t> cutoffs;
    for (double l : lambdas) {
        if (!(l >= 0)) throw domain_error("joint_gap_statistic: lambdas must be nonnegative");
        cutoffs.push_back(std::uint64_t(std::floor(l * y)));
    }
    std::uint64_t n = count(w, x);
    if (n == 0) throw coverage_error("joint_gap_statistic: no levels below x");
    return double(detail::gap_run_count(w, x, cutoffs)) / double(n);
}

namespace detail {

struct interval_scan {
    std::vector<std::uint64_t> histogram; // index m, last slot aggregates >= m_cap
    std::vector<long double> power_sums;  // power_sums[l] = sum over n of m^l
};

// Sliding count of elements in (n, n+q] for n = 1..x.
inline interval_scan scan_intervals(const sieve_window& w, std::uint64_t x, std::uint64_t q,
                                    unsigned m_cap, unsigned max_power) {
    if (w.start > 1 || w.end() < x + q + 1)
        throw coverage_error("scan_intervals: window must cover [1, x + q]");
    interval_scan out;
    out.histogram.assign(m_cap + 1, 0);
    out.power_sums.assign(max_power + 1, 0.0L);
    std::uint64_t m = w.bits.popcount_range(2 - w.start, q + 2 - w.start); // elements in (1, 1+q]
    std::vector<long double> psum(max_power + 1, 0.0L);
    for (std::uint64_t n = 1;; ++n) {
        out.histogram[std::min<std::uint64_t>(m, m_cap)] += 1;
        long double pw = 1;
        for (unsigned l = 0; l <= max_power; ++l) {
            psum[l] += pw;
            pw *= (long double)m;
        }
        if (n == x) break;
        m -= w.test(n + 1);
        m += w.test(n + 1 + q);
    }
    out.power_sums = psum;
    return out;
}

} // namespace detail

// Empirical distribution of N(n + lambda*y) - N(n) against the Poisson pmf.
// Slot m_max aggregates all counts >= m_max so the masses sum to one.
struct interval_count_report {
    std::vector<double> empirical;
    std::vector<double> poisson;
    std::uint64_t interval_length = 0;
};

inline interval_count_report interval_counts(std::uint64_t x, double lambda, double y,
                                             const sieve_window& w, unsigned m_max) {
    if (!(lambda >= 0)) throw domain_error("interval_counts: lambda must be nonnegative");
    std::uint64_t q = std::uint64_t(std::floor(lambda * y));
    auto scan = detail::scan_intervals(w, x, q, m_max, 0);
    interval_count_report rep;
    rep.interval_length = q;
    rep.empirical.resize(m_max + 1);
    for (unsigned m = 0; m <= m_max; ++m) rep.empirical[m] = double(scan.histogram[m]) / double(x);
    rep.poisson.resize(m_max + 1);
    double cum = 0;
    for (unsigned m = 0; m < m_max; ++m) {
        double pmf = std::exp(-lambda);
        for (unsigned t = 1; t <= m; ++t) pmf *= lambda / t;
        rep.poisson[m] = pmf;
        cum += pmf;
    }
    rep.poisson[m_max] = std::max(0.0, 1.0 - cum);
    return rep;
}

// (1/x) sum over n <= x of (N(n + lambda*y) - N(n))^ell.
inline long double empirical_moment(unsigned ell, std::uint64_t x, double lambda, double y,
                                    const sieve_window& w) {
    if (ell > 20) throw domain_error("empirical_moment: ell must be <= 20");
    std::uint64_t q = std::uint64_t(std::floor(lambda * y));
    auto scan = detail::scan_intervals(w, x, q, 0, ell);
    return scan.power_sums[ell] / (long double)x;
}

// The two inclusion-exclusion truncations that sandwich the gap-run count:
//   lower (depth r+2l+1) <= #{s_n <= x : next r gaps <= lambda_j y} <= upper (depth r+2l).
struct sandwich_report {
    long long lower = 0;
    std::uint64_t middle = 0;
    long long upper = 0;
};

namespace detail {

template <typename Fn>
void for_each_composition(unsigned k, unsigned r, std::vector<unsigned>& parts, Fn&& fn,
                          unsigned idx = 0, unsigned left = 0) {
    if (idx == 0) {
        parts.assign(r, 0);
        left = k;
    }
    if (idx == r - 1) {
        if (left >= 1) {
            parts[idx] = left;
            fn(parts);
        }
        return;
    }
    for (unsigned v = 1; v + (r - idx - 1) <= left; ++v) {
        parts[idx] = v;
        for_each_composition(k, r, parts, fn, idx + 1, left - v);
    }
}

// Integer lattice points of the chain region with integer block caps.
template <typename Fn>
void for_each_chain_point(const std::vector<unsigned>& parts,
                          const std::vector<std::uint64_t>& caps, Fn&& fn) {
    unsigned k = 0;
    for (unsigned p : parts) k += p;
    std::vector<std::uint64_t> block_end(parts.size());
    std::uint64_t acc = 0;
    for (std::size_t j = 0; j < parts.size(); ++j) block_end[j] = acc += parts[j];
    std::vector<std::int64_t> h(k);
    auto rec = [&](auto&& self, unsigned t, std::size_t j, std::int64_t base) -> void {
        if (t == k) {
            fn(const_cast<const std::vector<std::int64_t>&>(h));
            return;
        }
        std::int64_t lo = t == 0 ? 1 : h[t - 1] + 1;
        std::int64_t hi = base + std::int64_t(caps[j]) - std::int64_t(block_end[j] - 1 - t);
        for (std::int64_t v = lo; v <= hi; ++v) {
            h[t] = v;
            bool last = (t + 1 == block_end[j]);
            self(self, t + 1, j + (last ? 1 : 0), last ? v : base);
        }
    };
    rec(rec, 0, 0, 0);
}

} // namespace detail

inline sandwich_report inclusion_exclusion_bounds(unsigned r, const std::vector<double>& lambdas,
                                                  std::uint64_t x, double y, unsigned ell,
                                                  const sieve_window& w) {
    if (r < 1 || lambdas.size() != r)
        throw domain_error("inclusion_exclusion_bounds: need r >= 1 matching lambdas");
    std::vector<std::uint64_t> cutoffs;
    for (double l : lambdas) {
        if (!(l >= 0)) throw domain_error("inclusion_exclusion_bounds: lambdas must be >= 0");
        cutoffs.push_back(std::uint64_t(std::floor(l * y)));
    }
    sandwich_report rep;
    rep.middle = detail::gap_run_count(w, x, cutoffs);
    long long partial = 0;
    std::vector<unsigned> parts;
    for (unsigned k = r; k <= r + 2 * ell + 1; ++k) {
        long long layer = 0;
        detail::for_each_composition(k, r, parts, [&](const std::vector<unsigned>& iv) {
            detail::for_each_chain_point(iv, cutoffs, [&](const std::vector<std::int64_t>& hv) {
                std::vector<std::int64_t> v = hv;
                v.push_back(0);
                std::sort(v.begin(), v.end());
                layer += (long long)detail::tuple_count(w, v, x);
            });
        });
        partial += ((k - r) % 2 == 0 ? layer : -layer);
        if (k == r + 2 * ell) rep.upper = partial;
        if (k == r + 2 * ell + 1) rep.lower = partial;
    }
    return rep;
}

// sum of S_{o u h} over the lattice points of y*C, with the relative
// deviation from the volume prediction y^k vol(C).
struct sss_average_report {
    long double sum = 0;
    long double expected = 0; // y^k vol(C)
    long double rel_error = 0;
    std::uint64_t points = 0;
};

inline sss_average_report singular_series_average(const region& reg, bool with_zero, double y,
                                                  std::uint64_t cutoff = 100'000'000ull) {
    sss_average_report rep;
    unsigned k = reg.dimension();
    if (lattice_point_count(reg, y) > (std::uint64_t(1) << 22))
        throw budget_error("singular_series_average: too many lattice points at y=" +
                           std::to_string(y));
    std::map<std::vector<std::int64_t>, long double> memo; // keyed by normalized offsets
    for_each_lattice_point(reg, y, [&](const std::vector<std::int64_t>& hv) {
        std::vector<std::int64_t> v = hv;
        if (with_zero) v.insert(v.begin(), 0);
        std::vector<std::int64_t> key = v;
        for (auto& t : key) t -= v.front();
        auto it = memo.find(key);
        if (it == memo.end())
            it = memo.emplace(key, singular_series(offset_set(v), cutoff).value).first;
        rep.sum += it->second;
        ++rep.points;
    });
    rep.expected = std::pow((long double)y, (long double)k) * reg.volume();
    rep.rel_error = std::fabs(rep.sum - rep.expected) / rep.expected;
    return rep;
}

} // namespace sots
