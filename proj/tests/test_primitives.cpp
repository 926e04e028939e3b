#include "doctest.h"

#include <cmath>

#include "gbpi/primitives.hpp"

using namespace gbpi;

TEST_CASE("registry entries") {
    auto add = registry_lookup("add");
    CHECK(add->arity == 2);
    CHECK(add->linear);
    CHECK_FALSE(registry_lookup("mul")->linear);
    CHECK(registry_lookup("sigm") == registry_lookup("sigmoid"));
    CHECK_THROWS_AS(registry_lookup("bogus"), UnknownPrimitive);
    CHECK_THROWS_AS(registry_lookup("pdf_normal(0,-1)"), UnknownPrimitive);
    CHECK_THROWS_AS(registry_lookup("pdf_uniform(2,1)"), UnknownPrimitive);
}

TEST_CASE("normal density family") {
    auto pdf = registry_lookup("pdf_normal(1.1,0.1)");
    CHECK(pdf->arity == 1);
    CHECK_FALSE(pdf->linear);
    REQUIRE(pdf->pieces.size() == 2);
    CHECK(pdf->pieces[0].domain == Interval(ExtReal::neg_inf(), rat(11, 10)));
    CHECK(pdf->pieces[0].direction == Monotone::Increasing);
    CHECK(pdf->pieces[1].domain == Interval(rat(11, 10), ExtReal::pos_inf()));
    CHECK(pdf->pieces[1].direction == Monotone::Decreasing);
    CHECK(registry_lookup("pdf_normal( 1.1 , 0.1 )") == pdf);
    double x = 0.9;
    CHECK(pdf->eval_double(std::span<const double>(&x, 1)) ==
          doctest::Approx(std::exp(-2.0) / (0.1 * std::sqrt(2 * M_PI))));
}

TEST_CASE("uniform density") {
    auto pdf = registry_lookup("pdf_uniform(0,4)");
    Rational in(1), out(5);
    CHECK(pdf->eval_exact(std::span<const Rational>(&in, 1)) == rat(1, 4));
    CHECK(pdf->eval_exact(std::span<const Rational>(&out, 1)) == 0);
    std::vector<Interval> a{Interval(-1, 1)};
    CHECK(lift_eval(*pdf, a) == Interval(0, rat(1, 4)));
    std::vector<Interval> b{Interval(1, 2)};
    CHECK(lift_eval(*pdf, b) == Interval::point(rat(1, 4)));
}

TEST_CASE("monotone lifting is tight at exact points") {
    auto e = registry_lookup("exp");
    std::vector<Interval> zero{Interval(0, 0)};
    Interval r = lift_eval(*e, zero);
    CHECK(r.contains(ExtReal(1)));
    CHECK(r.hi().value() - r.lo().value() < Rational(1e-15));
    auto s = registry_lookup("sigmoid");
    Interval t = lift_eval(*s, zero);
    CHECK(t.contains(ExtReal(rat(1, 2))));
    std::vector<Interval> wide{Interval(ExtReal::neg_inf(), ExtReal::pos_inf())};
    Interval u = lift_eval(*s, wide);
    CHECK(u.lo() >= ExtReal(0));
    CHECK(u.hi() <= ExtReal(1));
}
