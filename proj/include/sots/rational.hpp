#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <sstream>
#include <string>

namespace sots {

// Exact rational arithmetic for local densities and cancellation sums.
using bigint = boost::multiprecision::cpp_int;
using rational = boost::multiprecision::cpp_rational;

inline rational rational_pow(const rational& base, int e) {
    rational r = 1;
    rational b = e < 0 ? rational(1) / base : base;
    for (int i = e < 0 ? -e : e; i > 0; --i) r *= b;
    return r;
}

inline std::string to_fraction_string(const rational& r) {
    std::ostringstream os;
    os << boost::multiprecision::numerator(r);
    if (boost::multiprecision::denominator(r) != 1)
        os << '/' << boost::multiprecision::denominator(r);
    return os.str();
}

inline long double to_long_double(const rational& r) {
    return boost::multiprecision::numerator(r).convert_to<long double>() /
           boost::multiprecision::denominator(r).convert_to<long double>();
}

} // namespace sots
