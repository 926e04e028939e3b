#include "doctest.h"

#include <random>

#include "gbpi/geometry.hpp"
#include "oracles.hpp"

using namespace gbpi;

namespace {

SymConstraint le(TermPtr v) { return SymConstraint{std::move(v), Rel::Le, Rational(0)}; }
SymConstraint gt(TermPtr v) { return SymConstraint{std::move(v), Rel::Gt, Rational(0)}; }
TermPtr a(int i) { return mk_svar(i); }
TermPtr num(const Rational& r) { return mk_num(r); }
TermPtr op(const char* name, TermPtr x, TermPtr y) { return mk_prim(name, {std::move(x), std::move(y)}); }

std::vector<Rational> unit(int d, int k, int sign = 1) {
    std::vector<Rational> e(static_cast<std::size_t>(d), Rational(0));
    e[static_cast<std::size_t>(k)] = sign;
    return e;
}

}  // namespace

TEST_CASE("linearize") {
    auto e = linearize(op("add", op("mul", num(3), a(1)), op("sub", a(2), num(rat(1, 2)))), 2);
    REQUIRE(e);
    CHECK(e->coef == std::vector<Rational>{3, 1});
    CHECK(e->constant == Interval::point(rat(-1, 2)));
    CHECK_FALSE(linearize(op("mul", a(1), a(2)), 2));
    CHECK_FALSE(linearize(mk_prim("exp", {a(1)}), 1));
}

TEST_CASE("half interval path") {
    SymPath p{a(1), 1, {le(op("sub", a(1), num(rat(1, 2))))}, {}};
    auto pp = build_polytopes(p, Interval(0, 1));
    CHECK(volume(pp.lb) == rat(1, 2));
    CHECK(volume(pp.ub) == rat(1, 2));
}

TEST_CASE("interval constants give the adverse row to lb and the favourable row to ub") {
    SymPath p{a(1), 1, {le(op("add", a(1), mk_lit(Interval(rat(-1, 10), rat(1, 10)))))}, {}};
    auto pp = build_polytopes(p, Interval::whole());
    REQUIRE(pp.lb.rows.size() == 1);
    REQUIRE(pp.ub.rows.size() == 1);
    CHECK(pp.lb.rows[0].a == std::vector<Rational>{1});
    CHECK(pp.lb.rows[0].b == rat(-1, 10));
    CHECK(pp.lb.empty == false);
    CHECK(pp.ub.rows[0].b == rat(1, 10));
    CHECK(volume(pp.lb) == 0);
    CHECK(volume(pp.ub) == rat(1, 10));
}

TEST_CASE("pedestrian towards-then-away constraints") {
    auto start = op("mul", num(3), a(1));
    std::vector<SymConstraint> delta{
        gt(start),
        gt(op("sub", a(3), num(rat(1, 2)))),
        gt(op("sub", start, a(2))),
        le(op("sub", a(5), num(rat(1, 2)))),
    };
    SymPath p{start, 5, delta, {}};
    auto pp = build_polytopes(p, Interval::whole());
    CHECK(pp.lb.rows.size() == 4);
    CHECK(pp.ub.rows.size() == 4);
    CHECK(pp.lb.dim == 5);
    // a1 > a2/3 with a3 > 1/2, a5 <= 1/2: (1 - 1/6) / 4
    CHECK(volume(pp.lb) == rat(5, 24));
}

TEST_CASE("lp bounds") {
    HPolytope box;
    box.dim = 2;
    LinExpr s{{1, 1}};
    CHECK(lp_bound(box, s) == Interval(0, 2));
    HPolytope half;
    half.dim = 1;
    half.add({1}, RowRel::Le, rat(1, 2));
    CHECK(lp_bound(half, LinExpr{{1}}) == Interval(0, rat(1, 2)));
    HPolytope none;
    none.dim = 1;
    none.add({1}, RowRel::Le, Rational(-1));
    CHECK_FALSE(lp_bound(none, LinExpr{{1}}).has_value());
}

TEST_CASE("lp optimum matches vertex enumeration and contains feasible points") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> dim(1, 4), nrows(1, 6), coef(-5, 5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
        int d = dim(rng);
        auto h = oracle::random_polytope(rng, d, nrows(rng));
        std::vector<Rational> c;
        for (int k = 0; k < d; ++k) c.push_back(Rational(coef(rng)));
        auto mx = lp_max(h, c);
        auto ref = oracle::vertex_max(h, c);
        REQUIRE(mx);
        REQUIRE(ref);
        CHECK(*mx == *ref);
        auto range = lp_bound(h, LinExpr{c});
        REQUIRE(range);
        int checked = 0;
        for (int s = 0; s < 20000 && checked < 50; ++s) {
            std::vector<Rational> x;
            for (int k = 0; k < d; ++k) x.push_back(Rational(u(rng)));
            if (!h.contains(x)) continue;
            Rational v(0);
            for (int k = 0; k < d; ++k) v += c[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(k)];
            CHECK(range->contains(ExtReal(v)));
            ++checked;
        }
    }
}

TEST_CASE("simple volumes") {
    HPolytope cube;
    cube.dim = 3;
    CHECK(volume(cube) == 1);
    HPolytope tri;
    tri.dim = 2;
    tri.add({1, 1}, RowRel::Le, Rational(1));
    CHECK(volume(tri) == rat(1, 2));
    HPolytope flat;
    flat.dim = 2;
    flat.add({1, 0}, RowRel::Le, Rational(0));
    CHECK(volume(flat) == 0);
    HPolytope empty;
    empty.dim = 2;
    empty.add({1, 1}, RowRel::Le, Rational(-1));
    CHECK(volume(empty) == 0);
}

TEST_CASE("Irwin-Hall volumes") {
    for (int n = 1; n <= 7; ++n)
        for (int num_t = 1; num_t < 4 * n; num_t += 3) {
            Rational t = rat(num_t, 4);
            HPolytope h;
            h.dim = n;
            h.add(std::vector<Rational>(static_cast<std::size_t>(n), Rational(1)), RowRel::Le, t);
            CHECK(volume(h) == oracle::irwin_hall(n, t));
        }
}

TEST_CASE("planar volumes match polygon clipping") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> nrows(1, 6);
    for (int trial = 0; trial < 200; ++trial) {
        auto h = oracle::random_polytope(rng, 2, nrows(rng));
        CHECK(volume(h) == oracle::clipped_area(h));
    }
}

TEST_CASE("volumes agree with rejection sampling") {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> dim(2, 4), nrows(1, 5);
    for (int trial = 0; trial < 20; ++trial) {
        auto h = oracle::random_polytope(rng, dim(rng), nrows(rng));
        double v = volume(h).get_d();
        auto hit = oracle::rejection_volume(h, rng, 200000);
        CHECK(std::fabs(hit.estimate - v) <= 3 * hit.sigma + 1e-9);
    }
}

TEST_CASE("slicing by a hyperplane is additive") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> dim(1, 5), nrows(0, 5), coef(-4, 4), off(0, 32);
    for (int trial = 0; trial < 60; ++trial) {
        int d = dim(rng);
        auto h = oracle::random_polytope(rng, d, nrows(rng));
        std::vector<Rational> cut;
        for (int k = 0; k < d; ++k) cut.push_back(Rational(coef(rng)));
        Rational c = rat(off(rng), 16);
        auto below = h, above = h;
        below.add(cut, RowRel::Le, c);
        std::vector<Rational> neg;
        for (const auto& x : cut) neg.push_back(-x);
        above.add(neg, RowRel::Le, -c);
        CHECK(volume(below) + volume(above) == volume(h));
    }
}

TEST_CASE("relaxed volume bounds over the cap") {
    // a chain a1 <= a2 <= ... <= a8 has volume 1/8!
    HPolytope chain;
    chain.dim = 8;
    for (int k = 0; k + 1 < 8; ++k) {
        std::vector<Rational> row(8, Rational(0));
        row[static_cast<std::size_t>(k)] = 1;
        row[static_cast<std::size_t>(k + 1)] = -1;
        chain.add(row, RowRel::Le, Rational(0));
    }
    CHECK(volume(chain) == rat(1, 40320));
    VolumeOptions small;
    small.max_dim = 4;
    CHECK_THROWS_AS(volume(chain, small), DimensionCap);
    auto b = volume_bounds(chain, small);
    CHECK(b.relaxed);
    CHECK(b.lower == 0);
    CHECK(b.upper >= rat(1, 40320));
    CHECK(b.upper <= rat(1, 24));
    auto exact = volume_bounds(chain);
    CHECK_FALSE(exact.relaxed);
    CHECK(exact.lower == exact.upper);
}

TEST_CASE("membership respects strict rows") {
    HPolytope h;
    h.dim = 1;
    h.add(unit(1, 0), RowRel::Lt, rat(1, 2));
    CHECK(h.contains({rat(1, 4)}));
    CHECK_FALSE(h.contains({rat(1, 2)}));
    CHECK_FALSE(h.contains({Rational(2)}));
    Bin b{Interval(0, 1), true};
    CHECK(b.contains(Rational(0)));
    CHECK_FALSE(b.contains(Rational(1)));
    CHECK(b.str() == "[0, 1)");
}
