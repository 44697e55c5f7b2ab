#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "tempoctrl/rational.hpp"

using namespace tempoctrl;

TEST_CASE("construction reduces to canonical form") {
    CHECK(Rat(2, 4) == Rat(1, 2));
    CHECK(Rat(-2, 4) == Rat(-1, 2));
    CHECK(Rat(2, -4) == Rat(-1, 2));
    CHECK(Rat(0, 7) == Rat(0));
    CHECK(Rat(6, 3).isInteger());
    CHECK(Rat(6, 3).num() == 2);
    CHECK_THROWS_AS(Rat(1, 0), std::domain_error);
}

TEST_CASE("arithmetic") {
    CHECK(Rat(1, 2) + Rat(1, 3) == Rat(5, 6));
    CHECK(Rat(1, 2) - Rat(1, 3) == Rat(1, 6));
    CHECK(Rat(2, 3) * Rat(3, 4) == Rat(1, 2));
    CHECK(Rat(1, 2) / Rat(1, 4) == Rat(2));
    CHECK(-Rat(1, 2) == Rat(-1, 2));
    CHECK_THROWS_AS(Rat(1) / Rat(0), std::domain_error);
}

TEST_CASE("comparisons are exact") {
    CHECK(Rat(1, 3) < Rat(1, 2));
    CHECK(Rat(-1, 2) < Rat(-1, 3));
    CHECK(Rat(2, 6) == Rat(1, 3));
    CHECK(Rat(7, 2) > Rat(3));
    // Values whose cross products overflow 64-bit must still compare right.
    Rat big(4'000'000'000'000'000'000LL);
    CHECK(big > big - Rat(1));
}

TEST_CASE("overflow is detected, not wrapped") {
    Rat big(std::numeric_limits<std::int64_t>::max());
    CHECK_THROWS_AS(big + Rat(1), std::overflow_error);
    CHECK_THROWS_AS(big * Rat(2), std::overflow_error);
}

TEST_CASE("parse and print round-trip") {
    CHECK(Rat::parse("3/4") == Rat(3, 4));
    CHECK(Rat::parse("-3/4") == Rat(-3, 4));
    CHECK(Rat::parse("12") == Rat(12));
    CHECK(Rat::parse("+5") == Rat(5));
    CHECK(Rat(3, 4).str() == "3/4");
    CHECK(Rat(-8).str() == "-8");
    CHECK_THROWS(Rat::parse("a"));
    CHECK_THROWS(Rat::parse(""));
    CHECK_THROWS(Rat::parse("1/"));

    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
        std::int64_t num = static_cast<std::int64_t>(rng() % 2001) - 1000;
        std::int64_t den = static_cast<std::int64_t>(rng() % 50) + 1;
        Rat r(num, den);
        CHECK(Rat::parse(r.str()) == r);
    }
}

TEST_CASE("grid rounding helpers") {
    Rat half(1, 2);
    CHECK(Rat(5, 4).floorToMultiple(half) == Rat(1));
    CHECK(Rat(5, 4).ceilToMultiple(half) == Rat(3, 2));
    CHECK(Rat(-5, 4).floorToMultiple(half) == Rat(-3, 2));
    CHECK(Rat(-5, 4).ceilToMultiple(half) == Rat(-1));
    CHECK(Rat(3, 2).floorToMultiple(half) == Rat(3, 2));
    CHECK(Rat(6).isMultipleOf(Rat(3)));
    CHECK(Rat(1, 2).isMultipleOf(Rat(1, 6)));
    CHECK(!Rat(1, 2).isMultipleOf(Rat(1, 3)));
}

TEST_CASE("bounds order with infinities") {
    CHECK(Bound::minusInf() < Bound(Rat(-100)));
    CHECK(Bound(Rat(100)) < Bound::plusInf());
    CHECK(Bound::minusInf() < Bound::plusInf());
    CHECK(Bound(Rat(1)) + Rat(2) == Bound(Rat(3)));
    CHECK(Bound::plusInf() + Rat(2) == Bound::plusInf());
    CHECK(-Bound::plusInf() == Bound::minusInf());
    CHECK_THROWS_AS(Bound::plusInf().finite(), std::domain_error);
}

TEST_CASE("intervals") {
    Interval iv(Rat(0), Rat(2));
    CHECK(iv.contains(Rat(0)));
    CHECK(iv.contains(Rat(2)));
    CHECK(!iv.contains(Rat(5, 2)));
    CHECK(iv.meets(Interval(Rat(2), Rat(3))));
    CHECK(!iv.meets(Interval(Rat(5, 2), Rat(3))));
    CHECK(iv.hullWith(Interval(Rat(1), Rat(4))) == Interval(Rat(0), Rat(4)));
    CHECK(Interval::atLeast(Rat(1)).contains(Rat(1000)));
    CHECK(!Interval::atLeast(Rat(1)).isFinite());
    CHECK(Interval(Rat(2), Rat(1)).wellFormed() == false);
    CHECK(Interval::point(Rat(3)).isPoint());
}
