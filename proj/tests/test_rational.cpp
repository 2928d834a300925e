#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdint>
#include <limits>
#include <random>

#include "doctest.h"
#include "tilesmith/rational.hpp"

using tilesmith::InputError;
using tilesmith::OverflowError;
using tilesmith::Rat;

TEST_CASE("construction normalizes") {
    CHECK(Rat(2, 4) == Rat(1, 2));
    CHECK(Rat(-2, 4) == Rat(-1, 2));
    CHECK(Rat(2, -4) == Rat(-1, 2));
    CHECK(Rat(-2, -4) == Rat(1, 2));
    CHECK(Rat(0, -7) == Rat(0));
    CHECK(Rat(0, 5).den() == 1);
    CHECK(Rat(6, 3).is_integer());
    CHECK(Rat(7, 2).den() == 2);
    CHECK_THROWS_AS(Rat(1, 0), InputError);
}

TEST_CASE("arithmetic") {
    CHECK(Rat(1, 2) + Rat(1, 3) == Rat(5, 6));
    CHECK(Rat(1, 2) - Rat(1, 3) == Rat(1, 6));
    CHECK(Rat(2, 3) * Rat(3, 4) == Rat(1, 2));
    CHECK(Rat(1, 2) / Rat(1, 4) == Rat(2));
    CHECK(-Rat(3, 7) == Rat(-3, 7));
    CHECK(Rat(-3, 7).abs() == Rat(3, 7));
    CHECK_THROWS_AS(Rat(1) / Rat(0), InputError);
}

TEST_CASE("ordering") {
    CHECK(Rat(1, 3) < Rat(1, 2));
    CHECK(Rat(-1, 2) < Rat(-1, 3));
    CHECK(Rat(-1, 2) < Rat(0));
    CHECK(Rat(7, 3) > Rat(2));
    CHECK(Rat(1, 2) <= Rat(1, 2));
    CHECK(Rat(2, 4) >= Rat(1, 2));
    CHECK(Rat(1000000007, 1000000009) < Rat(1000000009, 1000000007));
}

TEST_CASE("overflow is detected, not wrapped") {
    const std::int64_t big = std::numeric_limits<std::int64_t>::max();
    CHECK_THROWS_AS(Rat(big) + Rat(big), OverflowError);
    CHECK_THROWS_AS(Rat(big) * Rat(big), OverflowError);
    CHECK_THROWS_AS(-Rat(std::numeric_limits<std::int64_t>::min()), OverflowError);
    // Cancellation keeps results representable even when cross products are huge.
    Rat half_big(big / 2 * 2, 2);
    CHECK(half_big.den() == 1);
    CHECK(Rat(1, big) * Rat(big) == Rat(1));
}

TEST_CASE("text round trip") {
    CHECK(Rat(1, 2).str() == "1/2");
    CHECK(Rat(-5).str() == "-5");
    CHECK(Rat::parse("3/4") == Rat(3, 4));
    CHECK(Rat::parse("-6/4") == Rat(-3, 2));
    CHECK(Rat::parse("42") == Rat(42));
    CHECK_THROWS_AS(Rat::parse(""), InputError);
    CHECK_THROWS_AS(Rat::parse("1/2/3"), InputError);
    CHECK_THROWS_AS(Rat::parse("abc"), InputError);
    CHECK_THROWS_AS(Rat::parse("1/x"), InputError);
}

TEST_CASE("field identities on random samples") {
    std::mt19937_64 rng(20240817);
    std::uniform_int_distribution<std::int64_t> num(-1000, 1000);
    std::uniform_int_distribution<std::int64_t> den(1, 1000);
    for (int i = 0; i < 500; ++i) {
        Rat a(num(rng), den(rng)), b(num(rng), den(rng)), c(num(rng), den(rng));
        CHECK(a + b == b + a);
        CHECK((a + b) + c == a + (b + c));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK(a + b - b == a);
        if (!b.is_zero()) CHECK((a * b) / b == a);
        CHECK((a < b) == !(a >= b));
        if (a < b && b < c) CHECK(a < c);
        CHECK(Rat::parse(a.str()) == a);
    }
}
