#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sots {

// Raised when an enumeration or memory budget would be exceeded.
// Budgets are always an error, never a silent approximation.
struct budget_error : std::runtime_error {
    explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a sieve window does not cover the range a scan needs.
struct coverage_error : std::runtime_error {
    explicit coverage_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised for invalid arguments (bad offsets, x outside a window, ...).
struct domain_error : std::invalid_argument {
    explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

// Raised when an isolated membership test cannot classify its input.
struct unclassified_error : std::runtime_error {
    explicit unclassified_error(const std::string& what) : std::runtime_error(what) {}
};

struct config {
    // Residue enumeration budget for local density computations.
    static constexpr std::uint64_t residue_budget = std::uint64_t(1) << 28;
    // Dense sieve budget: one bit per integer.
    static constexpr std::uint64_t sieve_budget = 10'000'000'000ull;
    // Far-window sieves iterate a <= sqrt(X+W); cap that loop.
    static constexpr std::uint64_t window_iteration_budget = 100'000'000ull;
    // Segment size (in integers) for dense sieving.
    static constexpr std::uint64_t segment_bits = std::uint64_t(1) << 26;
};

} // namespace sots
