#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>

#include "gbpi/rational.hpp"

namespace gbpi {

// Extended real: a rational or one of the two infinities.
class ExtReal {
public:
    enum class Kind : unsigned char { NegInf, Finite, PosInf };

    ExtReal() : kind_(Kind::Finite) {}
    ExtReal(const Rational& q) : kind_(Kind::Finite), q_(q) {}
    ExtReal(long n) : kind_(Kind::Finite), q_(n) {}

    static ExtReal pos_inf() { return ExtReal(Kind::PosInf); }
    static ExtReal neg_inf() { return ExtReal(Kind::NegInf); }

    Kind kind() const { return kind_; }
    bool finite() const { return kind_ == Kind::Finite; }
    bool is_pos_inf() const { return kind_ == Kind::PosInf; }
    bool is_neg_inf() const { return kind_ == Kind::NegInf; }
    const Rational& value() const { return q_; }
    int sign() const;
    bool is_zero() const { return finite() && sgn(q_) == 0; }

    double down() const;
    double up() const;
    std::string str() const;

    friend bool operator==(const ExtReal& a, const ExtReal& b);
    friend bool operator<(const ExtReal& a, const ExtReal& b);
    friend bool operator!=(const ExtReal& a, const ExtReal& b) { return !(a == b); }
    friend bool operator<=(const ExtReal& a, const ExtReal& b) { return !(b < a); }
    friend bool operator>(const ExtReal& a, const ExtReal& b) { return b < a; }
    friend bool operator>=(const ExtReal& a, const ExtReal& b) { return !(a < b); }

    ExtReal operator-() const;

private:
    explicit ExtReal(Kind k) : kind_(k) {}
    Kind kind_;
    Rational q_;
};

// Sums never meet opposite infinities in interval code; asserted in debug builds.
ExtReal operator+(const ExtReal& a, const ExtReal& b);
// 0 * inf = 0.
ExtReal operator*(const ExtReal& a, const ExtReal& b);

const ExtReal& ext_min(const ExtReal& a, const ExtReal& b);
const ExtReal& ext_max(const ExtReal& a, const ExtReal& b);

class Interval {
public:
    Interval() : lo_(0), hi_(0) {}
    Interval(ExtReal lo, ExtReal hi);
    static Interval point(const Rational& r) { return Interval(r, r); }
    static Interval whole() { return Interval(ExtReal::neg_inf(), ExtReal::pos_inf()); }
    static Interval nonneg() { return Interval(0, ExtReal::pos_inf()); }
    static Interval unit() { return Interval(0, 1); }
    static Interval one() { return Interval(1, 1); }

    const ExtReal& lo() const { return lo_; }
    const ExtReal& hi() const { return hi_; }
    bool is_point() const { return lo_ == hi_; }
    bool bounded() const { return lo_.finite() && hi_.finite(); }
    bool contains(const ExtReal& x) const { return lo_ <= x && x <= hi_; }
    bool subset_of(const Interval& o) const { return o.lo_ <= lo_ && hi_ <= o.hi_; }
    bool intersects(const Interval& o) const { return lo_ <= o.hi_ && o.lo_ <= hi_; }
    // Width; +inf when unbounded.
    ExtReal width() const;

    std::string str() const;

    friend bool operator==(const Interval& a, const Interval& b) { return a.lo_ == b.lo_ && a.hi_ == b.hi_; }
    friend bool operator!=(const Interval& a, const Interval& b) { return !(a == b); }

private:
    ExtReal lo_, hi_;
};

std::ostream& operator<<(std::ostream& os, const ExtReal& x);
std::ostream& operator<<(std::ostream& os, const Interval& i);

Interval add(const Interval& a, const Interval& b);
Interval sub(const Interval& a, const Interval& b);
Interval mul(const Interval& a, const Interval& b);
Interval neg(const Interval& a);
Interval abs(const Interval& a);
Interval min(const Interval& a, const Interval& b);
Interval max(const Interval& a, const Interval& b);
Interval hull(const Interval& a, const Interval& b);

// Interval lattice with a bottom element.
using LatticeInterval = std::optional<Interval>;

LatticeInterval join(const LatticeInterval& a, const LatticeInterval& b);
LatticeInterval meet(const LatticeInterval& a, const LatticeInterval& b);
bool leq(const LatticeInterval& a, const LatticeInterval& b);
LatticeInterval widen(const LatticeInterval& a, const LatticeInterval& b);
std::string to_string(const LatticeInterval& a);

// Float rendering: lo rounded toward -inf, hi toward +inf.
std::pair<double, double> outward(const Interval& a);

}  // namespace gbpi
