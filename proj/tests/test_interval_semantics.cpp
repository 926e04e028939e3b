#include "doctest.h"

#include <random>

#include "gbpi/concrete.hpp"
#include "gbpi/frontend.hpp"
#include "gbpi/interval_semantics.hpp"

using namespace gbpi;

namespace {

Interval half_lo() { return Interval(0, rat(1, 2)); }
Interval half_hi() { return Interval(rat(1, 2), 1); }

// All n-fold products of k equal pieces of [0,1].
std::vector<IntervalTrace> full_grid(int n, int k) {
    std::vector<IntervalTrace> out{IntervalTrace{}};
    for (int d = 0; d < n; ++d) {
        std::vector<IntervalTrace> next;
        for (const auto& t : out)
            for (int i = 0; i < k; ++i) {
                auto c = t;
                c.emplace_back(rat(i, k), rat(i + 1, k));
                next.push_back(std::move(c));
            }
        out = std::move(next);
    }
    return out;
}

}  // namespace

TEST_CASE("sample consumes the head interval") {
    IntervalTrace t{half_lo()};
    auto r = istep(IConfig{mk_sample(), 0, Interval::one()}, t);
    REQUIRE(r.next.size() == 1);
    CHECK(r.next[0].term->lit == half_lo());
    CHECK(r.next[0].head == 1);
    CHECK(r.next[0].weight == Interval::one());
}

TEST_CASE("undecided guard keeps both branches with weight times [0,1]") {
    auto t = mk_if(mk_lit(Interval(-1, 1)), mk_num(1), mk_num(2));
    auto r = istep(IConfig{t, 0, Interval(2, 3)}, {});
    REQUIRE(r.next.size() == 2);
    CHECK(r.next[0].weight == Interval(0, 3));
    CHECK(r.next[1].weight == Interval(0, 3));
    CHECK(r.next[0].term->lit == Interval::point(Rational(1)));
    CHECK(r.next[1].term->lit == Interval::point(Rational(2)));
}

TEST_CASE("score multiplies the interval weight") {
    auto r = istep(IConfig{mk_score(mk_lit(Interval(2, 3))), 0, Interval::one()}, {});
    REQUIRE(r.next.size() == 1);
    CHECK(r.next[0].term->lit == Interval(2, 3));
    CHECK(r.next[0].weight == Interval(2, 3));
}

TEST_CASE("irun examples") {
    auto a = irun(parse_program("sample"), {half_lo()});
    REQUIRE(a.results.size() == 1);
    CHECK(a.results[0].value == half_lo());
    CHECK(a.results[0].weight == Interval::one());
    CHECK_FALSE(a.flagged);

    auto b = irun(parse_program("if sample - sample <= 0 then 0 else 1"), {Interval(0, 1), Interval(0, 1)});
    REQUIRE(b.results.size() == 2);
    CHECK(b.results[0].value == Interval::point(Rational(0)));
    CHECK(b.results[0].weight == Interval(0, 1));
    CHECK(b.results[1].value == Interval::point(Rational(1)));
    CHECK(b.results[1].weight == Interval(0, 1));

    auto c = irun(parse_program("score(-1)"), {});
    CHECK(c.flagged);
}

TEST_CASE("exact cover of a sample") {
    auto p = parse_program("sample");
    std::vector<IntervalTrace> ts{{half_lo()}, {half_hi()}};
    CHECK(lower_bound(p, ts, half_lo()) == rat(1, 2));
    CHECK(upper_bound(p, ts, half_lo()) == ExtReal(rat(1, 2)) + ExtReal(rat(1, 2)));
    auto open = Interval(0, rat(49, 100));
    CHECK(upper_bound(p, ts, open) == ExtReal(rat(1, 2)));
}

TEST_CASE("overlapping traces are rejected") {
    std::vector<IntervalTrace> ts{{Interval(0, rat(6, 10))}, {Interval(rat(3, 10), 1)}};
    CHECK_FALSE(compatible(ts[0], ts[1]));
    CHECK_THROWS_AS(check_compatible(ts), IncompatibleTraces);
    CHECK_THROWS_AS(lower_bound(parse_program("sample"), ts, half_lo()), IncompatibleTraces);
    // exhaustive, just not compatible
    CHECK(certify_exhaustive(ts));
}

TEST_CASE("geometric coin on dyadic grids") {
    auto p = parse_program("(fix go (x:R):R -> 0 (+0.5) 1 + go 0) 0");
    for (std::size_t k = 1; k <= 4; ++k) {
        auto ts = adaptive_grid(p, 2, k);
        CHECK(certify_exhaustive(ts));
        auto b = trace_bounds(p, ts, Interval::point(Rational(0)));
        CHECK(b.lower == rat(1, 2));
        CHECK(b.upper >= ExtReal(rat(1, 2)));
        // the closed piece [1/2,1] leaves the guard undecided at its left end
        if (k == 1) CHECK(b.upper == ExtReal(1));
    }
}

TEST_CASE("bound laws on grids") {
    const char* programs[] = {
        "sample + sample",
        "if sample <= 0.3 then score(2); sample else 2 * sample",
        "score(sample); sample * sample",
        "observe sample from normal(0.5, 0.3); sample",
        "max(sample, sample)",
    };
    const Interval u1(0, rat(1, 2)), u2(rat(1, 2), 1), u12(0, 1);
    for (const char* src : programs) {
        INFO(src);
        auto p = parse_program(src);
        int n = static_cast<int>(irun(p, {}).exhausted ? 2 : 0);
        auto coarse = full_grid(n, 4), fine = full_grid(n, 8);
        auto b1 = trace_bounds(p, coarse, u1), b2 = trace_bounds(p, coarse, u2), b12 = trace_bounds(p, coarse, u12);
        CHECK(ExtReal(b1.lower) <= b1.upper);
        CHECK(b12.lower >= b1.lower + b2.lower);
        CHECK(b12.upper <= b1.upper + b2.upper);
        for (const auto& u : {u1, u2, u12}) {
            auto c = trace_bounds(p, coarse, u), f = trace_bounds(p, fine, u);
            CHECK(f.lower >= c.lower);
            CHECK(f.upper <= c.upper);
            auto e = estimate_measure(p, u, 20000, 3);
            CHECK(c.lower.get_d() - 3 * e.stderr_ <= e.estimate);
            CHECK(e.estimate <= c.upper.up() + 3 * e.stderr_);
        }
    }
}
