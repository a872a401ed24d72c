#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "msl/exact.hpp"
#include "msl/random.hpp"

using namespace msl;

namespace {

ExactScalar random_scalar(Rng& rng, std::int64_t d) {
    auto small = [&rng] { return Rational(static_cast<long long>(rng.below(19)) - 9, 1 + static_cast<long long>(rng.below(6))); };
    return ExactScalar(small(), d == 0 ? Rational(0) : small(), d);
}

}  // namespace

TEST_CASE("construction and normal form") {
    CHECK(ExactScalar(Rational(3, 2), 0, 5).d() == 0);
    CHECK(ExactScalar::sqrt_of(12) == ExactScalar(0, 2, 3));
    CHECK(ExactScalar::sqrt_of(16) == ExactScalar(4));
    CHECK(ExactScalar::sqrt_of(0).is_zero());
    CHECK_THROWS(ExactScalar(0, 1, 1));
    CHECK_THROWS(ExactScalar::sqrt_of(-2));
}

TEST_CASE("parse_scalar") {
    CHECK(parse_scalar("3/2") == ExactScalar(Rational(3, 2)));
    CHECK(parse_scalar("0.9") == ExactScalar(Rational(9, 10)));
    CHECK(parse_scalar("-1.25") == ExactScalar(Rational(-5, 4)));
    const auto golden = parse_scalar("(1+sqrt5)/2");
    CHECK(golden == ExactScalar(Rational(1, 2), Rational(1, 2), 5));
    CHECK(golden * golden == golden + 1);
    CHECK(parse_scalar("-1/2*sqrt(5)") == ExactScalar(0, Rational(-1, 2), 5));
    CHECK(parse_scalar("sqrt8") == ExactScalar(0, 2, 2));
    CHECK_THROWS(parse_scalar("1/0"));
    CHECK_THROWS(parse_scalar("2+"));
    CHECK_THROWS(parse_scalar("sqrt2+sqrt3"));
    CHECK_THROWS(parse_scalar("abc"));
}

TEST_CASE("sign, order and string form") {
    CHECK(ExactScalar(1, -1, 2).sign() < 0);
    CHECK(ExactScalar(2, -1, 3).sign() > 0);
    CHECK(ExactScalar(-3, 2, 2).sign() < 0);
    CHECK(parse_scalar("sqrt2") < parse_scalar("3/2"));
    CHECK(parse_scalar("sqrt2") > parse_scalar("7/5"));
    CHECK(ExactScalar(Rational(1, 2), Rational(1, 2), 5).to_double() == doctest::Approx((1 + std::sqrt(5.0)) / 2));
    CHECK(parse_scalar(ExactScalar(Rational(1, 2), Rational(-3, 4), 5).str()) ==
          ExactScalar(Rational(1, 2), Rational(-3, 4), 5));
}

TEST_CASE("property: field axioms in Q(sqrt d)") {
    Rng rng(61);
    for (std::int64_t d : {0, 2, 5}) {
        for (int trial = 0; trial < 200; ++trial) {
            const auto x = random_scalar(rng, d), y = random_scalar(rng, d), z = random_scalar(rng, d);
            CHECK(x + y == y + x);
            CHECK(x * (y + z) == x * y + x * z);
            CHECK((x - y) + y == x);
            if (!x.is_zero()) {
                CHECK(x * x.inverse() == ExactScalar(1));
                CHECK((y / x) * x == y);
                CHECK(x.pow(-2) * x.pow(3) == x);
            }
            CHECK(std::abs((x * y).to_double() - x.to_double() * y.to_double()) <= 1e-9);
            CHECK(((x < y) == (x.to_double() < y.to_double()) || std::abs(x.to_double() - y.to_double()) < 1e-12));
            CHECK(ExactScalarHash{}(x + y) == ExactScalarHash{}(y + x));
        }
    }
    CHECK_THROWS(parse_scalar("sqrt2") + parse_scalar("sqrt3"));
    CHECK_THROWS(ExactScalar(0).inverse());
}

TEST_CASE("exact roots") {
    CHECK(rational_root(Rational(27, 8), 3) == Rational(3, 2));
    CHECK_FALSE(rational_root(Rational(2), 2).has_value());
    CHECK(exact_sqrt(ExactScalar(2)) == ExactScalar::sqrt_of(2));
    CHECK(exact_sqrt(ExactScalar(Rational(9, 4))) == ExactScalar(Rational(3, 2)));
    // (1 + sqrt5)^2 = 6 + 2 sqrt5.
    CHECK(exact_sqrt(ExactScalar(6, 2, 5)) == ExactScalar(1, 1, 5));
    CHECK_FALSE(exact_sqrt(ExactScalar(1, 1, 2)).has_value());
    CHECK_FALSE(exact_sqrt(ExactScalar(-4)).has_value());
    CHECK(exact_root(ExactScalar(16), 4) == ExactScalar(2));
    CHECK(exact_root(ExactScalar(4), 4) == ExactScalar::sqrt_of(2));
    CHECK_FALSE(exact_root(ExactScalar(2), 3).has_value());
    Rng rng(62);
    for (int trial = 0; trial < 100; ++trial) {
        const auto x = random_scalar(rng, 5);
        if (x.is_zero()) continue;
        const auto r = exact_sqrt(x * x);
        REQUIRE(r.has_value());
        CHECK(*r == x.abs());
    }
}
