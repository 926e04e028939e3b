#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace gbpi {

using Rational = mpq_class;

// Exact value of a decimal literal such as "0.25", "3", "1e-3".
Rational parse_decimal(std::string_view text);

// Finite decimal expansion when the denominator is 2^a 5^b, otherwise "p/q".
std::string to_decimal_string(const Rational& q);

double to_double_down(const Rational& q);
double to_double_up(const Rational& q);
double to_double_nearest(const Rational& q);

// Shortest round-trip rendering of a double; "inf" / "-inf" for infinities.
std::string shortest_repr(double d);

inline Rational rat(long n, unsigned long d = 1) {
    Rational q(n, d);
    q.canonicalize();
    return q;
}

}  // namespace gbpi
