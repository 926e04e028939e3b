#include "gbpi/interval.hpp"

#include <cassert>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gbpi {

int ExtReal::sign() const {
    switch (kind_) {
        case Kind::NegInf: return -1;
        case Kind::PosInf: return 1;
        default: return sgn(q_);
    }
}

double ExtReal::down() const {
    if (kind_ == Kind::NegInf) return -std::numeric_limits<double>::infinity();
    if (kind_ == Kind::PosInf) return std::numeric_limits<double>::infinity();
    return to_double_down(q_);
}

double ExtReal::up() const {
    if (kind_ == Kind::NegInf) return -std::numeric_limits<double>::infinity();
    if (kind_ == Kind::PosInf) return std::numeric_limits<double>::infinity();
    return to_double_up(q_);
}

std::string ExtReal::str() const {
    if (kind_ == Kind::NegInf) return "-inf";
    if (kind_ == Kind::PosInf) return "inf";
    return to_decimal_string(q_);
}

bool operator==(const ExtReal& a, const ExtReal& b) {
    if (a.kind_ != b.kind_) return false;
    return !a.finite() || a.q_ == b.q_;
}

bool operator<(const ExtReal& a, const ExtReal& b) {
    if (a.kind_ != b.kind_) return static_cast<int>(a.kind_) < static_cast<int>(b.kind_);
    return a.finite() && a.q_ < b.q_;
}

ExtReal ExtReal::operator-() const {
    if (kind_ == Kind::NegInf) return pos_inf();
    if (kind_ == Kind::PosInf) return neg_inf();
    return ExtReal(Rational(-q_));
}

ExtReal operator+(const ExtReal& a, const ExtReal& b) {
    if (a.finite() && b.finite()) return ExtReal(Rational(a.value() + b.value()));
    assert(!((a.is_pos_inf() && b.is_neg_inf()) || (a.is_neg_inf() && b.is_pos_inf())));
    return a.finite() ? b : a;
}

ExtReal operator*(const ExtReal& a, const ExtReal& b) {
    if (a.finite() && b.finite()) return ExtReal(Rational(a.value() * b.value()));
    int s = a.sign() * b.sign();
    if (s == 0) return ExtReal(0);
    return s > 0 ? ExtReal::pos_inf() : ExtReal::neg_inf();
}

const ExtReal& ext_min(const ExtReal& a, const ExtReal& b) { return b < a ? b : a; }
const ExtReal& ext_max(const ExtReal& a, const ExtReal& b) { return a < b ? b : a; }

Interval::Interval(ExtReal lo, ExtReal hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (hi_ < lo_ || lo_.is_pos_inf() || hi_.is_neg_inf())
        throw std::invalid_argument("malformed interval [" + lo_.str() + "," + hi_.str() + "]");
}

ExtReal Interval::width() const {
    if (!bounded()) return ExtReal::pos_inf();
    return ExtReal(Rational(hi_.value() - lo_.value()));
}

std::string Interval::str() const {
    if (is_point()) return lo_.str();
    return "[" + lo_.str() + "," + hi_.str() + "]";
}

std::ostream& operator<<(std::ostream& os, const ExtReal& x) { return os << x.str(); }
std::ostream& operator<<(std::ostream& os, const Interval& i) { return os << "[" << i.lo() << "," << i.hi() << "]"; }

Interval add(const Interval& a, const Interval& b) { return {a.lo() + b.lo(), a.hi() + b.hi()}; }

Interval sub(const Interval& a, const Interval& b) { return {a.lo() + (-b.hi()), a.hi() + (-b.lo())}; }

Interval neg(const Interval& a) { return {-a.hi(), -a.lo()}; }

Interval mul(const Interval& a, const Interval& b) {
    if (a.is_point() && b.is_point() && a.lo().finite() && b.lo().finite()) {
        ExtReal p = a.lo() * b.lo();
        return {p, p};
    }
    ExtReal p1 = a.lo() * b.lo(), p2 = a.lo() * b.hi(), p3 = a.hi() * b.lo(), p4 = a.hi() * b.hi();
    ExtReal lo = ext_min(ext_min(p1, p2), ext_min(p3, p4));
    ExtReal hi = ext_max(ext_max(p1, p2), ext_max(p3, p4));
    return {lo, hi};
}

Interval abs(const Interval& a) {
    if (a.lo().sign() >= 0) return a;
    if (a.hi().sign() <= 0) return neg(a);
    return {ExtReal(0), ext_max(-a.lo(), a.hi())};
}

Interval min(const Interval& a, const Interval& b) { return {ext_min(a.lo(), b.lo()), ext_min(a.hi(), b.hi())}; }
Interval max(const Interval& a, const Interval& b) { return {ext_max(a.lo(), b.lo()), ext_max(a.hi(), b.hi())}; }
Interval hull(const Interval& a, const Interval& b) { return {ext_min(a.lo(), b.lo()), ext_max(a.hi(), b.hi())}; }

LatticeInterval join(const LatticeInterval& a, const LatticeInterval& b) {
    if (!a) return b;
    if (!b) return a;
    return hull(*a, *b);
}

LatticeInterval meet(const LatticeInterval& a, const LatticeInterval& b) {
    if (!a || !b) return std::nullopt;
    ExtReal lo = ext_max(a->lo(), b->lo());
    ExtReal hi = ext_min(a->hi(), b->hi());
    if (hi < lo) return std::nullopt;
    return Interval(lo, hi);
}

bool leq(const LatticeInterval& a, const LatticeInterval& b) {
    if (!a) return true;
    if (!b) return false;
    return a->subset_of(*b);
}

LatticeInterval widen(const LatticeInterval& a, const LatticeInterval& b) {
    if (!a) return b;
    if (!b) return a;
    bool keep_lo = a->lo() <= b->lo();
    bool keep_hi = b->hi() <= a->hi();
    return Interval(keep_lo ? a->lo() : ExtReal::neg_inf(), keep_hi ? a->hi() : ExtReal::pos_inf());
}

std::string to_string(const LatticeInterval& a) {
    if (!a) return "⊥";
    std::ostringstream os;
    os << *a;
    return os.str();
}

std::pair<double, double> outward(const Interval& a) { return {a.lo().down(), a.hi().up()}; }

}  // namespace gbpi
