#include "doctest.h"

#include <cmath>
#include <random>

#include "gbpi/interval.hpp"
#include "gbpi/primitives.hpp"

using namespace gbpi;

namespace {

const ExtReal kInf = ExtReal::pos_inf();
const ExtReal kNegInf = ExtReal::neg_inf();

LatticeInterval li(long a, long b) { return Interval(a, b); }

// Random dyadic interval inside [-range, range]; dyadic endpoints keep double evaluation exact at the inputs.
Interval random_box(std::mt19937_64& rng, double range) {
    std::uniform_real_distribution<double> u(-range, range);
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    return Interval(Rational(a), Rational(b));
}

double random_in(std::mt19937_64& rng, const Interval& i) {
    double lo = i.lo().value().get_d(), hi = i.hi().value().get_d();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double x = lo + (hi - lo) * u(rng);
    return std::clamp(x, lo, hi);
}

}  // namespace

TEST_CASE("endpoint arithmetic") {
    CHECK(add(Interval(1, 2), Interval(3, 4)) == Interval(4, 6));
    CHECK(mul(Interval(-1, 2), Interval(3, 4)) == Interval(-4, 8));
    CHECK(sub(Interval(1, 2), Interval(3, 4)) == Interval(-3, -1));
    CHECK(abs(Interval(-3, 2)) == Interval(0, 3));
    CHECK(min(Interval(0, 5), Interval(1, 2)) == Interval(0, 2));
    CHECK(max(Interval(0, 5), Interval(1, 2)) == Interval(1, 5));
}

TEST_CASE("zero times infinity is zero") {
    CHECK(ExtReal(0) * kInf == ExtReal(0));
    CHECK(mul(Interval(0, 0), Interval(0, kInf)) == Interval(0, 0));
    CHECK(mul(Interval(1, 2), Interval(0, kInf)) == Interval(0, kInf));
    CHECK(mul(Interval(-1, 2), Interval(0, kInf)) == Interval::whole());
}

TEST_CASE("lattice operations") {
    CHECK_FALSE(meet(li(0, 1), li(2, 3)).has_value());
    CHECK(join(std::nullopt, li(1, 2)) == li(1, 2));
    CHECK(leq(li(1, 2), li(0, 3)));
    CHECK_FALSE(leq(li(0, 3), li(1, 2)));
    CHECK(leq(std::nullopt, li(5, 5)));
    CHECK(meet(li(0, 2), li(1, 3)) == li(1, 2));
}

TEST_CASE("widening table") {
    CHECK(widen(li(0, 1), li(0, 2)) == LatticeInterval(Interval(0, kInf)));
    CHECK(widen(li(0, 2), li(0, 1)) == li(0, 2));
    CHECK(widen(std::nullopt, li(3, 4)) == li(3, 4));
    CHECK(widen(li(0, 1), li(-1, 1)) == LatticeInterval(Interval(kNegInf, 1)));
    CHECK(widen(li(0, 1), li(-1, 2)) == LatticeInterval(Interval::whole()));
    CHECK(widen(li(0, 1), std::nullopt) == li(0, 1));
}

TEST_CASE("lattice laws on random intervals") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> d(-5, 5);
    auto any = [&]() -> LatticeInterval {
        if (d(rng) == 5) return std::nullopt;
        int a = d(rng), b = d(rng);
        return Interval(std::min(a, b), std::max(a, b));
    };
    for (int i = 0; i < 2000; ++i) {
        auto a = any(), b = any(), c = any();
        CHECK(join(a, b) == join(b, a));
        CHECK(meet(a, b) == meet(b, a));
        CHECK(join(join(a, b), c) == join(a, join(b, c)));
        CHECK(meet(meet(a, b), c) == meet(a, meet(b, c)));
        CHECK(join(a, meet(a, b)) == a);
        if (a) CHECK(meet(a, join(a, b)) == a);
        CHECK(leq(a, a));
        if (leq(a, b) && leq(b, a)) CHECK(a == b);
        if (leq(a, b) && leq(b, c)) CHECK(leq(a, c));
        CHECK(leq(join(a, b), widen(a, b)));
    }
}

TEST_CASE("widened ascending chains stabilise") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> step(0, 3);
    for (int trial = 0; trial < 500; ++trial) {
        LatticeInterval chain = std::nullopt;
        LatticeInterval w = std::nullopt;
        int last_change = 0;
        for (int k = 0; k < 200; ++k) {
            long lo = chain ? chain->lo().value().get_num().get_si() - step(rng) : 0;
            long hi = chain ? chain->hi().value().get_num().get_si() + step(rng) : 0;
            chain = Interval(lo, hi);
            auto next = widen(w, join(w, chain));
            if (next != w) last_change = k;
            w = next;
        }
        CHECK(last_change < 64);
    }
}

TEST_CASE("outward rendering") {
    auto [l, u] = outward(Interval::point(rat(1, 3)));
    CHECK(Rational(l) <= rat(1, 3));
    CHECK(Rational(u) >= rat(1, 3));
    CHECK(l < u);
    auto [a, b] = outward(Interval(0, 1));
    CHECK(a == 0.0);
    CHECK(b == 1.0);
    auto [c, e] = outward(Interval(rat(1, 10), rat(2, 10)));
    CHECK(Rational(c) <= rat(1, 10));
    CHECK(Rational(e) >= rat(1, 5));
    CHECK(Rational(std::nextafter(c, 1.0)) > rat(1, 10));
}

TEST_CASE("pdf on its increasing piece") {
    auto pdf = registry_lookup("pdf_normal(1.1,0.1)");
    std::vector<Interval> arg{Interval(rat(9, 10), Rational(1))};
    Interval r = lift_eval(*pdf, arg);
    // dense grid oracle
    double lo = 1e300, hi = -1e300;
    for (int k = 0; k <= 10000; ++k) {
        double x = 0.9 + 0.1 * k / 10000.0;
        double v = std::exp(-(x - 1.1) * (x - 1.1) / 0.02) / (0.1 * std::sqrt(2 * M_PI));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    // the oracle itself carries double rounding
    CHECK(r.lo().value().get_d() <= lo * (1 + 1e-14));
    CHECK(r.hi().value().get_d() >= hi * (1 - 1e-14));
    CHECK(r.lo().value().get_d() == doctest::Approx(lo).epsilon(1e-12));
    CHECK(r.hi().value().get_d() == doctest::Approx(hi).epsilon(1e-12));
}

TEST_CASE("containment and isotony fuzz over the registry") {
    std::mt19937_64 rng(2024);
    std::vector<PrimPtr> prims;
    for (const auto& n : registry_names()) prims.push_back(registry_lookup(n));
    prims.push_back(registry_lookup("pdf_normal(1.1,0.1)"));
    prims.push_back(registry_lookup("pdf_uniform(-1,2)"));
    int violations = 0;
    for (int i = 0; i < 20000; ++i) {
        const auto& f = prims[static_cast<std::size_t>(i) % prims.size()];
        double range = f->kind == PrimKind::Exp ? 20.0 : 5.0;
        std::vector<Interval> box, inner;
        std::vector<double> x;
        for (int k = 0; k < f->arity; ++k) {
            box.push_back(random_box(rng, range));
            double p = random_in(rng, box.back());
            x.push_back(p);
            double q = random_in(rng, box.back());
            inner.push_back(Interval(Rational(std::min(p, q)), Rational(std::max(p, q))));
        }
        Interval r = lift_eval(*f, box);
        double v = f->eval_double(x);
        // double evaluation is only an oracle up to a few ulps
        double slack = 1e-13 * std::fabs(v);
        if (!r.intersects(Interval(Rational(v - slack), Rational(v + slack)))) ++violations;
        if (!lift_eval(*f, inner).subset_of(r)) ++violations;
    }
    CHECK(violations == 0);
}
