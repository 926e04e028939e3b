#include "doctest.h"

#include <cstdlib>
#include <random>

#include "gbpi/bounds.hpp"
#include "gbpi/frontend.hpp"

using namespace gbpi;

namespace {

TermPtr corpus(const std::string& name) {
    const char* dir = std::getenv("GBPI_CORPUS");
    REQUIRE(dir != nullptr);
    return parse_file(std::string(dir) + "/" + name + ".spcf");
}

SymConstraint le(TermPtr v) { return SymConstraint{std::move(v), Rel::Le, Rational(0)}; }
TermPtr sub(TermPtr x, const Rational& c) { return mk_prim("sub", {std::move(x), mk_num(c)}); }

LinearOptions linear_splits(int k) {
    LinearOptions o;
    o.splits_expr = k;
    o.merge_below = 0;
    return o;
}

IntervalOptions interval_splits(int k) {
    IntervalOptions o;
    o.splits_var = k;
    return o;
}

BinnedBounds tight(std::vector<std::pair<Rational, Rational>> lbub, Rational out_lb, Rational out_ub) {
    BinnedBounds b;
    Rational lo(0);
    for (auto& [l, u] : lbub) {
        b.bins.push_back(BinBounds{Bin{Interval(lo, Rational(lo + 1)), true}, l, ExtReal(u)});
        lo += 1;
    }
    b.outside_lb = out_lb;
    b.outside_ub = ExtReal(out_ub);
    return b;
}

}  // namespace

TEST_CASE("pure volume path") {
    SymPath p{mk_svar(1), 1, {le(sub(mk_svar(1), rat(1, 2)))}, {}};
    auto r = analyze_path_linear(p, Bin{Interval(0, 1)});
    CHECK(r.lower == rat(1, 2));
    CHECK(r.upper == ExtReal(rat(1, 2)));
    CHECK(r.method == PathMethod::Linear);
}

TEST_CASE("score boxes sandwich a linear weight") {
    SymPath p{mk_svar(1), 2, {}, {mk_svar(2)}};
    auto one = analyze_path_linear(p, Bin{Interval(0, 1)}, linear_splits(1));
    CHECK(one.lower == 0);
    CHECK(one.upper == ExtReal(1));
    auto two = analyze_path_linear(p, Bin{Interval(0, 1)}, linear_splits(2));
    CHECK(two.lower == rat(1, 4));
    CHECK(two.upper == ExtReal(rat(3, 4)));
}

TEST_CASE("nonlinear values go to the interval backend") {
    SymPath sq{mk_prim("mul", {mk_svar(1), mk_svar(1)}), 1, {}, {}};
    CHECK_THROWS_AS(analyze_path_linear(sq, Bin{Interval(0, rat(1, 4))}), NotLinear);
    Rational prev_gap(2);
    for (int k : {1, 4, 16, 64}) {
        auto r = analyze_path_interval(sq, Bin{Interval(0, rat(1, 4))}, interval_splits(k));
        CHECK(r.lower <= rat(1, 2));
        CHECK(r.upper >= ExtReal(rat(1, 2)));
        Rational gap = r.upper.value() - r.lower;
        CHECK(gap <= prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap < rat(1, 20));

    SymPath id{mk_svar(1), 1, {}, {}};
    // the closed cell [1/2,1] touches the bin at one point, so only refinement shrinks the excess
    auto h = analyze_path_interval(id, Bin{Interval(0, rat(1, 2))}, interval_splits(2));
    CHECK(h.lower == rat(1, 2));
    CHECK(h.upper >= ExtReal(rat(1, 2)));
    CHECK(h.upper <= ExtReal(rat(5, 8)));
    auto h64 = analyze_path_interval(id, Bin{Interval(0, rat(1, 2))}, interval_splits(64));
    CHECK(h64.lower == rat(1, 2));
    CHECK(h64.upper <= ExtReal(rat(1, 2) + rat(1, 64)));
}

TEST_CASE("coarser interval grids are never tighter") {
    SymPath p{mk_prim("add", {mk_svar(1), mk_prim("mul", {mk_svar(2), mk_svar(2)})}), 2,
              {le(sub(mk_svar(1), rat(2, 3)))}, {mk_prim("exp", {mk_svar(2)})}};
    Bin b{Interval(rat(1, 4), 1)};
    auto c = analyze_path_interval(p, b, interval_splits(1));
    auto f = analyze_path_interval(p, b, interval_splits(4));
    CHECK(c.lower <= f.lower);
    CHECK(f.upper <= c.upper);
}

TEST_CASE("two point program") {
    auto b = compute_bounds(corpus("two_point"), {Bin{Interval(rat(-1, 4), rat(1, 4))}, Bin{Interval(rat(3, 4), rat(5, 4))}});
    for (const auto& bin : b.bins) {
        CHECK(bin.lb == rat(1, 2));
        CHECK(bin.ub == ExtReal(rat(1, 2)));
        CHECK(bin.norm_lb == rat(1, 2));
        CHECK(bin.norm_ub == rat(1, 2));
    }
    CHECK(b.z_lb == 1);
    CHECK(b.z_ub == ExtReal(1));
}

TEST_CASE("constant score") {
    auto b = compute_bounds(parse_program("score(2); sample"), {Bin{Interval(0, 1)}});
    CHECK(b.z_lb == 2);
    CHECK(b.z_ub == ExtReal(2));
}

TEST_CASE("discrete score posterior") {
    auto b = compute_bounds(corpus("discrete_score"), {point_bin(Rational(0)), point_bin(Rational(1))});
    CHECK(b.bins[0].norm_lb == rat(1, 4));
    CHECK(b.bins[0].norm_ub == rat(1, 4));
    CHECK(b.bins[1].norm_lb == rat(3, 4));
    CHECK(b.z_lb == 2);
}

TEST_CASE("geometric law") {
    std::vector<Bin> bins;
    for (int k = 0; k <= 5; ++k) bins.push_back(point_bin(Rational(k)));
    BoundsOptions o;
    o.depth = 120;
    auto b = compute_bounds(corpus("geometric"), bins, o);
    Rational p(1, 2);
    for (const auto& bin : b.bins) {
        CHECK(bin.lb <= p);
        CHECK(bin.ub >= ExtReal(p));
        CHECK(bin.norm_lb <= p);
        CHECK(bin.norm_ub >= p);
        CHECK(bin.norm_ub - bin.norm_lb <= rat(1, 512));
        p /= 2;
    }
}

TEST_CASE("box-partition programs are computed exactly") {
    struct Case {
        const char* src;
        Interval bin;
        Rational mass;
    };
    // masses by hand: each guard cuts [0,1]^n into boxes, and every sample is a fresh draw
    const Case cases[] = {
        {"if sample <= 0.3 then score(2); sample else 2 * sample", Interval(0, rat(1, 2)), rat(19, 40)},
        {"if sample <= 0.3 then score(2); sample else 2 * sample", Interval(1, 2), rat(7, 20)},
        {"if sample <= 0.5 then (if sample <= 0.25 then 0 else 1) else 2", Interval(rat(1, 2), 3), rat(7, 8)},
        {"score(3); if sample <= 0.2 then 5 else sample", Interval(0, 1), rat(12, 5)},
    };
    for (const auto& c : cases) {
        INFO(c.src);
        auto b = aggregate(parse_program(c.src), {Bin{c.bin}});
        CHECK(b.bins[0].lb == c.mass);
        CHECK(b.bins[0].ub == ExtReal(c.mass));
    }
}

TEST_CASE("linear and interval backends agree") {
    for (const char* name : {"score_linear", "uniform_observe", "triangle", "scaled_sum", "binomial", "score_branch"}) {
        INFO(name);
        auto p = corpus(name);
        auto bins = make_bins(0, 3, 6);
        BoundsOptions lin, iv;
        lin.method = Method::Linear;
        iv.method = Method::Interval;
        auto a = aggregate(p, bins, lin), b = aggregate(p, bins, iv);
        CHECK(a.interval_paths == 0);
        CHECK(b.linear_paths == 0);
        for (std::size_t k = 0; k < bins.size(); ++k) {
            CHECK(ExtReal(a.bins[k].lb) <= b.bins[k].ub);
            CHECK(ExtReal(b.bins[k].lb) <= a.bins[k].ub);
        }
    }
}

TEST_CASE("finer score boxes never loosen the bounds") {
    for (const char* name : {"score_linear", "observe_normal", "score_square", "sum_observe", "exp_score"}) {
        INFO(name);
        auto p = corpus(name);
        auto ex = explore(p);
        auto bins = make_bins(0, 3, 5);
        for (const auto& path : ex.paths) {
            std::vector<PathBounds> prev;
            for (int k : {1, 2, 4, 8, 16}) {
                std::vector<PathBounds> cur;
                try {
                    cur = analyze_path_linear(path, bins, linear_splits(k));
                } catch (const NotLinear&) {
                    break;
                }
                for (std::size_t b = 0; b < prev.size(); ++b) {
                    CHECK(cur[b].lower >= prev[b].lower);
                    CHECK(cur[b].upper <= prev[b].upper);
                }
                prev = std::move(cur);
            }
        }
    }
}

TEST_CASE("triangle bounds tighten with splits") {
    auto p = parse_program("if sample + sample - 1 <= 0 then 1 else 0");
    Rational prev(2);
    for (int k : {4, 8, 16, 32}) {
        BoundsOptions o;
        o.method = Method::Interval;
        o.interval.splits_var = k;
        auto b = compute_bounds(p, {point_bin(Rational(1))}, o);
        Rational w = b.bins[0].ub.value() - b.bins[0].lb;
        CHECK(w < prev);
        CHECK(b.bins[0].lb <= rat(1, 2));
        CHECK(b.bins[0].ub >= ExtReal(rat(1, 2)));
        prev = w;
    }
    CHECK(prev <= rat(1, 20));
}

TEST_CASE("normalize examples") {
    auto exact = normalize(tight({{1, 1}, {3, 3}}, 0, 0));
    CHECK(exact.bins[0].norm_lb == rat(1, 4));
    CHECK(exact.bins[0].norm_ub == rat(1, 4));
    CHECK(exact.bins[1].norm_lb == rat(3, 4));

    auto vacuous = normalize(tight({{0, 1}, {0, 5}}, 0, 0));
    for (const auto& b : vacuous.bins) {
        CHECK(b.norm_lb == 0);
        CHECK(b.norm_ub == 1);
    }

    auto pair = normalize(tight({{1, 2}, {1, 2}}, 0, 0));
    CHECK(pair.bins[0].norm_lb == rat(1, 3));
    CHECK(pair.bins[0].norm_ub == rat(2, 3));
}

TEST_CASE("normalized bounds contain every consistent posterior") {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> mass(0, 20), pad(0, 6), nb(1, 5);
    for (int trial = 0; trial < 2000; ++trial) {
        int n = nb(rng);
        std::vector<Rational> truth;
        std::vector<std::pair<Rational, Rational>> lbub;
        Rational z(0);
        for (int k = 0; k < n; ++k) {
            Rational m = rat(mass(rng), 4);
            truth.push_back(m);
            z += m;
            lbub.emplace_back(std::max<Rational>(0, m - rat(pad(rng), 8)), m + rat(pad(rng), 8));
        }
        Rational out = rat(mass(rng), 8);
        z += out;
        if (sgn(z) == 0) continue;
        auto b = normalize(tight(lbub, std::max<Rational>(0, out - rat(pad(rng), 8)), out + rat(pad(rng), 8)));
        for (int k = 0; k < n; ++k) {
            Rational p = truth[static_cast<std::size_t>(k)] / z;
            CHECK(b.bins[static_cast<std::size_t>(k)].norm_lb <= p);
            CHECK(b.bins[static_cast<std::size_t>(k)].norm_ub >= p);
        }
    }
}

TEST_CASE("outside mass and Z") {
    auto b = compute_bounds(corpus("two_point"), {Bin{Interval(rat(-1, 4), rat(1, 4))}});
    CHECK(b.outside_lb == rat(1, 2));
    CHECK(b.outside_ub == ExtReal(rat(1, 2)));
    CHECK(b.bins[0].norm_lb == rat(1, 2));
    CHECK(b.bins[0].norm_ub == rat(1, 2));
}

TEST_CASE("bounds are deterministic") {
    auto p = corpus("observe_normal");
    auto bins = make_bins(0, 3, 10);
    auto a = compute_bounds(p, bins), b = compute_bounds(p, bins);
    for (std::size_t k = 0; k < bins.size(); ++k) {
        CHECK(a.bins[k].lb == b.bins[k].lb);
        CHECK(a.bins[k].ub == b.bins[k].ub);
    }
    CHECK(a.z_lb == b.z_lb);
}
