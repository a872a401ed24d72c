#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "msl/entropy.hpp"
#include "msl/measure.hpp"
#include "msl/random.hpp"
#include "msl/stationary.hpp"

using namespace msl;

namespace {

const double kCantorDim = std::log(2.0) / std::log(3.0);

DyadicMeasure1D random_measure(Rng& rng, int level, int count) {
    std::vector<Cell> cells;
    for (int j = 0; j < count; ++j) {
        const double u = rng.uniform() + 1e-3;
        cells.push_back({static_cast<std::int64_t>(rng.below(std::uint64_t{1} << level)), u * u});
    }
    return DyadicMeasure1D::from_cells(level, std::move(cells));
}

// Independent oracle: level-n Cantor masses by enumerating the 2^d level-d triadic intervals
// (each of mass 2^-d) and splitting each one's mass among dyadic cells by its own Cantor
// sub-structure, recursively until the interval fits in one cell.
void triadic_fill(std::vector<double>& mass, int n, long double lo, long double len, long double w) {
    const long double scale = std::ldexp(1.0L, n);
    const auto a = static_cast<std::int64_t>(std::floor(lo * scale));
    const auto b = static_cast<std::int64_t>(std::floor((lo + len) * scale));
    if (a == b || len * scale < 1e-6L) {
        mass[static_cast<std::size_t>(a)] += static_cast<double>(w);
        return;
    }
    triadic_fill(mass, n, lo, len / 3, w / 2);
    triadic_fill(mass, n, lo + 2 * len / 3, len / 3, w / 2);
}

double oracle_cantor_entropy(int n) {
    std::vector<double> mass(std::size_t{1} << n, 0.0);
    triadic_fill(mass, n, 0.0L, 1.0L, 1.0L);
    double h = 0.0;
    for (double m : mass) {
        if (m > 0.0) h -= m * std::log2(m);
    }
    return h;
}

}  // namespace

TEST_CASE("entropy examples") {
    CHECK(entropy(DyadicMeasure1D::uniform_unit(10), 10).value_bits == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(entropy(DyadicMeasure1D::dirac(10, 77), 10).value_bits == 0.0);
    const auto mu = middle_third_cantor(20);
    const double h = entropy(mu, 20).value_bits;
    // Oracle: 13.4535 bits, which sits 0.835 above 20 log_3 2.
    CHECK(h == doctest::Approx(oracle_cantor_entropy(20)).epsilon(1e-9));
    CHECK(h == doctest::Approx(13.4535).epsilon(1e-5));
    CHECK_THROWS(entropy(mu, 21));
}

TEST_CASE("conditional entropy") {
    const auto u = DyadicMeasure1D::uniform_unit(12);
    CHECK(conditional_entropy(u, 9, 4).value_bits == doctest::Approx(5.0));
    CHECK(conditional_entropy(DyadicMeasure1D::dirac(12, 5), 12, 3).value_bits == 0.0);
    CHECK_THROWS(conditional_entropy(u, 4, 9));
    Rng rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const int level = 6 + static_cast<int>(rng.below(10));
        const auto mu = random_measure(rng, level, 1 + static_cast<int>(rng.below(300)));
        const int n = static_cast<int>(rng.below(static_cast<std::uint64_t>(level + 1)));
        const int m = n + static_cast<int>(rng.below(static_cast<std::uint64_t>(level - n + 1)));
        const double lhs = conditional_entropy(mu, m, n).value_bits;
        CHECK(std::abs(lhs - (entropy(mu, m).value_bits - entropy(mu, n).value_bits)) <= 1e-9);
    }
}

TEST_CASE("property: counting bound, sandwich and chain rule on random measures") {
    Rng rng(22);
    for (int trial = 0; trial < 200; ++trial) {
        const int level = 5 + static_cast<int>(rng.below(10));
        const auto a = random_measure(rng, level, 1 + static_cast<int>(rng.below(200)));
        const auto b = random_measure(rng, level, 1 + static_cast<int>(rng.below(200)));
        const int m = static_cast<int>(rng.below(static_cast<std::uint64_t>(level + 1)));
        CHECK(entropy(a, m).value_bits <= std::log2(static_cast<double>(coarsen_to(a, m).size())) + 1e-9);
        CHECK(entropy(a, m).value_bits >= 0.0);

        const double alpha = rng.uniform();
        const std::vector<std::pair<double, DyadicMeasure1D>> parts{{alpha, a}, {1.0 - alpha, b}};
        const double mixed = entropy(mixture(parts), m).value_bits;
        const double avg = alpha * entropy(a, m).value_bits + (1 - alpha) * entropy(b, m).value_bits;
        const double ha = alpha > 0 && alpha < 1 ? -alpha * std::log2(alpha) - (1 - alpha) * std::log2(1 - alpha) : 0;
        CHECK(avg <= mixed + 1e-9);
        CHECK(mixed <= avg + ha + 1e-9);

        // Chain rule with a translated partition E and dyadic F.
        const int n = static_cast<int>(rng.below(static_cast<std::uint64_t>(level + 1)));
        const auto e = shifted_dyadic_labeler(level, m, static_cast<std::int64_t>(rng.below(1000)) - 500);
        const auto f = dyadic_labeler(level, n);
        CHECK(std::abs(joint_entropy(a, e, f) - conditional_partition_entropy(a, e, f) - partition_entropy(a, f)) <=
              1e-9);
    }
}

TEST_CASE("multiscale formula") {
    const auto u = DyadicMeasure1D::uniform_unit(20);
    const auto ru = multiscale_check(u, 4, 16);
    CHECK(std::abs(ru.gap) <= 1e-12);
    const auto rd = multiscale_check(DyadicMeasure1D::dirac(20, 3), 4, 16);
    CHECK(rd.lhs == 0.0);
    CHECK(rd.rhs == 0.0);
    const auto rc = multiscale_check(middle_third_cantor(20), 4, 16);
    CHECK(std::abs(rc.gap) <= 4.0 * 4 / 16);
    CHECK_THROWS(multiscale_check(u, 16, 16));
}

TEST_CASE("property: multiscale gap bound over random measures in [0,1)") {
    Rng rng(23);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 6 + static_cast<int>(rng.below(8));
        const int m = 1 + static_cast<int>(rng.below(4));
        const auto mu = random_measure(rng, n + m, 1 + static_cast<int>(rng.below(2000)));
        const auto r = multiscale_check(mu, m, n);
        CHECK(std::abs(r.gap) <= 4.0 * m / n);
    }
}

TEST_CASE("entropy porosity") {
    const auto mu = middle_third_cantor(20);
    const double h = std::log2(15.0) / 4;
    for (double delta : {0.01, 0.1}) {
        const auto v = entropy_porosity_test(mu, h, delta, 4, 0, 16);
        CHECK(v.p == doctest::Approx(1.0));
        CHECK(v.passes);
    }
    const auto vu = entropy_porosity_test(DyadicMeasure1D::uniform_unit(16), 0.5, 0.1, 4, 0, 12);
    CHECK(vu.p == 0.0);
    CHECK_FALSE(vu.passes);
    const auto vd = entropy_porosity_test(DyadicMeasure1D::dirac(16, 9), 0.0, 0.1, 4, 0, 12);
    CHECK(vd.p == doctest::Approx(1.0));
    CHECK(vd.passes);
    CHECK(max_component_entropy(mu, 4, 0, 16) <= h + 1e-12);
}

TEST_CASE("porosity passes to components on Cantor-type measures") {
    const WeightedIFS biased{{{1.0 / 3.0, 0.0}, {1.0 / 3.0, 2.0 / 3.0}}, {0.3, 0.7}};
    for (const auto& mu : {middle_third_cantor(20), self_similar_measure(biased, 20)}) {
        const double h = 0.95, delta = 0.2;
        const int m = 4, n = 12, k = 2;
        const auto v = entropy_porosity_test(mu, h, delta * delta / 2, m, 0, n);
        REQUIRE(v.passes);
        CHECK(component_porosity_failure(mu, h, delta, m, n, k) < delta + 4.0 * k / n);
    }
}

TEST_CASE("entropy dimension") {
    const auto leb = entropy_dim_estimate([](int n) { return DyadicMeasure1D::uniform_unit(n); }, 16);
    for (const auto& row : leb.table) CHECK(row.h_over_n == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(leb.slope == doctest::Approx(1.0));

    const auto c = entropy_dim_estimate(middle_third_cantor(20), 20);
    CHECK(std::abs(c.slope - kCantorDim) <= 0.02);
    CHECK(c.lower <= c.upper);

    const WeightedIFS quarter{{{1.0 / 3.0, 0.0}, {1.0 / 3.0, 2.0 / 3.0}, {1.0 / 3.0, 4.0 / 3.0}}, {0.25, 0.5, 0.25}};
    const auto s = entropy_dim_estimate(self_similar_measure(quarter, 20), 20);
    CHECK(std::abs(s.slope - 1.5 / std::log2(3.0)) <= 0.02);

    const std::string csv = edim_csv(c);
    CHECK(csv.rfind("n,H_bits,H_over_n\n", 0) == 0);
}

TEST_CASE("local and pointwise dimension") {
    const auto u = DyadicMeasure1D::uniform_unit(18);
    CHECK(local_dimension(u, 0.3, 12) == doctest::Approx(1.0));
    CHECK(local_dimension(DyadicMeasure1D::dirac(18, 5), std::ldexp(5.5, -18), 12) == 0.0);
    const auto mu = middle_third_cantor(18);
    CHECK(std::abs(local_dimension(mu, 0.0, 18) - 0.63) <= 0.05);
    CHECK_THROWS(local_dimension(mu, 0.5, 18));

    CHECK(entropy_average_scale(11, 0.2) == 17);
    CHECK(std::abs(pointwise_dim_estimate(u, 0.3, 0.2, 11) - 0.8) <= 0.02);
    CHECK(pointwise_dim_estimate(DyadicMeasure1D::dirac(18, 5), std::ldexp(5.5, -18), 0.2, 11) == 0.0);
    CHECK(pointwise_dim_estimate(mu, 0.0, 0.2, 11) >= 0.63 - 0.2 - 0.05);
}

TEST_CASE("ls_slope") {
    const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
    CHECK(ls_slope(x, y) == doctest::Approx(2.0));
    CHECK_THROWS(ls_slope(std::vector<double>{1}, std::vector<double>{1}));
}
