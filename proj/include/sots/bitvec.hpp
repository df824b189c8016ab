#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace sots {

// Flat bit vector with word access. std::vector<bool> hides its words,
// which we need for shifted-AND scans and range popcounts.
class bit_vector {
public:
    bit_vector() = default;
    explicit bit_vector(std::uint64_t n, bool value = false)
        : size_(n), words_((n + 63) / 64, value ? ~std::uint64_t(0) : 0) {
        trim();
    }

    std::uint64_t size() const { return size_; }

    bool test(std::uint64_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1;
    }
    void set(std::uint64_t i) { words_[i >> 6] |= std::uint64_t(1) << (i & 63); }
    void reset(std::uint64_t i) { words_[i >> 6] &= ~(std::uint64_t(1) << (i & 63)); }

    const std::uint64_t* words() const { return words_.data(); }
    std::uint64_t* words() { return words_.data(); }
    std::uint64_t word_count() const { return words_.size(); }

    // Word w of the vector shifted right by `shift` bits (bit i of the
    // result is bit 64*w + shift + i of the vector); reads past the end
    // are zero.
    std::uint64_t word_shifted(std::uint64_t w, std::uint64_t shift) const {
        std::uint64_t idx = w + (shift >> 6);
        unsigned s = unsigned(shift & 63);
        std::uint64_t lo = idx < words_.size() ? words_[idx] : 0;
        if (s == 0) return lo;
        std::uint64_t hi = idx + 1 < words_.size() ? words_[idx + 1] : 0;
        return (lo >> s) | (hi << (64 - s));
    }

    // Number of set bits with index in [lo, hi).
    std::uint64_t popcount_range(std::uint64_t lo, std::uint64_t hi) const {
        if (lo >= hi) return 0;
        std::uint64_t wl = lo >> 6, wh = (hi - 1) >> 6;
        std::uint64_t mask_lo = ~std::uint64_t(0) << (lo & 63);
        std::uint64_t mask_hi = ~std::uint64_t(0) >> (63 - ((hi - 1) & 63));
        if (wl == wh) return std::uint64_t(std::popcount(words_[wl] & mask_lo & mask_hi));
        std::uint64_t n = std::uint64_t(std::popcount(words_[wl] & mask_lo));
        for (std::uint64_t w = wl + 1; w < wh; ++w) n += std::uint64_t(std::popcount(words_[w]));
        n += std::uint64_t(std::popcount(words_[wh] & mask_hi));
        return n;
    }

    std::uint64_t popcount() const { return popcount_range(0, size_); }

    // Smallest set index >= from, or size() if none.
    std::uint64_t next_set(std::uint64_t from) const {
        if (from >= size_) return size_;
        std::uint64_t w = from >> 6;
        std::uint64_t word = words_[w] & (~std::uint64_t(0) << (from & 63));
        while (true) {
            if (word) return (w << 6) + std::uint64_t(std::countr_zero(word));
            if (++w == words_.size()) return size_;
            word = words_[w];
        }
    }

    bool operator==(const bit_vector& o) const = default;

private:
    void trim() {
        if (size_ & 63) words_.back() &= ~std::uint64_t(0) >> (64 - (size_ & 63));
    }

    std::uint64_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

} // namespace sots
