#include "gbpi/rational.hpp"

#include <array>
#include <cfloat>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gbpi {

Rational parse_decimal(std::string_view text) {
    std::string mantissa;
    long exponent = 0;
    bool seen_dot = false;
    bool negative = false;
    std::size_t i = 0;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
        negative = text[i] == '-';
        ++i;
    }
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c >= '0' && c <= '9') {
            mantissa.push_back(c);
            if (seen_dot) --exponent;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else if (c == 'e' || c == 'E') {
            exponent += std::stol(std::string(text.substr(i + 1)));
            break;
        } else {
            throw std::invalid_argument("malformed number: " + std::string(text));
        }
    }
    if (mantissa.empty()) throw std::invalid_argument("malformed number: " + std::string(text));
    mpz_class num(mantissa, 10);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
    Rational q = exponent >= 0 ? Rational(num * scale) : Rational(num, scale);
    q.canonicalize();
    return negative ? Rational(-q) : q;
}

std::string to_decimal_string(const Rational& q) {
    mpz_class den = q.get_den();
    unsigned long twos = 0, fives = 0;
    while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
        den /= 2;
        ++twos;
    }
    while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
        den /= 5;
        ++fives;
    }
    if (den != 1) return q.get_str();
    unsigned long digits = std::max(twos, fives);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);
    mpz_class scaled = q.get_num() * scale / q.get_den();
    bool negative = scaled < 0;
    if (negative) scaled = -scaled;
    std::string s = scaled.get_str();
    if (digits > 0) {
        if (s.size() <= digits) s.insert(0, digits - s.size() + 1, '0');
        s.insert(s.size() - digits, ".");
    }
    return negative ? "-" + s : s;
}

namespace {

const Rational& dbl_max() {
    static const Rational m(DBL_MAX);
    return m;
}

}  // namespace

double to_double_down(const Rational& q) {
    if (q > dbl_max()) return DBL_MAX;
    if (q < -dbl_max()) return -std::numeric_limits<double>::infinity();
    double d = q.get_d();
    if (Rational(d) > q) d = std::nextafter(d, -std::numeric_limits<double>::infinity());
    return d;
}

double to_double_up(const Rational& q) {
    if (q > dbl_max()) return std::numeric_limits<double>::infinity();
    if (q < -dbl_max()) return -DBL_MAX;
    double d = q.get_d();
    if (Rational(d) < q) d = std::nextafter(d, std::numeric_limits<double>::infinity());
    return d;
}

double to_double_nearest(const Rational& q) {
    double lo = to_double_down(q);
    double hi = to_double_up(q);
    if (lo == hi || std::isinf(lo) || std::isinf(hi)) return std::isinf(lo) ? hi : lo;
    Rational mid = (Rational(lo) + Rational(hi)) / 2;
    return q < mid ? lo : hi;
}

std::string shortest_repr(double d) {
    if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), d);
    return std::string(buf.data(), res.ptr);
}

}  // namespace gbpi
