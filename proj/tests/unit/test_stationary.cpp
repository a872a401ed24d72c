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

double binary_entropy(double p) { return -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

}  // namespace

TEST_CASE("stopping times") {
    Rng rng(41);
    const FiniteSampler half(WeightedIFS{{{0.5, 0.0}}, {1.0}});
    const auto a = stopping_time_compose(half, 3, rng);
    CHECK(a.tau == 3);
    CHECK(a.map.norm() == 0.125);

    const FiniteSampler p45(WeightedIFS{{{0.45, 0.0}, {0.45, 0.55}}, {0.5, 0.5}});
    CHECK(stopping_time_compose(p45, 3, rng).tau == 3);

    const BoxSampler box(0.4, 0.5, 0.0, 0.5);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto s = stopping_time_compose(box, 20, rng);
        CHECK(s.tau <= 20);
        CHECK(s.map.norm() <= std::ldexp(1.0, -20));
        CHECK(s.map.norm() >= std::ldexp(0.4, -20));
    }
    CHECK(stopping_time_cap(20, 0.5) == 20);
}

TEST_CASE("WeightedIFS validation") {
    CHECK_THROWS(WeightedIFS{{{1.0, 0.0}}, {1.0}}.validate());
    CHECK_THROWS(WeightedIFS{{{0.5, 0.0}, {0.5, 0.5}}, {0.3, 0.3}}.validate());
    CHECK_THROWS(BoxSampler(0.5, 1.0, 0.0, 1.0));
    const auto ifs = WeightedIFS{{{1.0 / 3.0, 0.0}, {-0.25, 1.0}}, {0.5, 0.5}};
    CHECK(ifs.r0() == 0.25);
    CHECK(ifs.r1() == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("self-similar measures") {
    const auto leb = self_similar_measure({{{0.5, 0.0}, {0.5, 0.5}}, {0.5, 0.5}}, 14);
    CHECK(entropy(leb, 14).value_bits == doctest::Approx(14.0));

    const auto cantor = self_similar_measure({{{1.0 / 3.0, 0.0}, {1.0 / 3.0, 2.0 / 3.0}}, {0.5, 0.5}}, 20);
    CHECK(std::abs(entropy_dim_estimate(cantor, 20).slope - kCantorDim) <= 0.02);
    CHECK(total_variation(cantor, middle_third_cantor(20)) <= 0.02);

    const auto bern = self_similar_measure({{{0.5, 0.0}, {0.5, 0.5}}, {0.3, 0.7}}, 18);
    CHECK(std::abs(entropy_dim_estimate(bern, 18).slope - binary_entropy(0.3)) <= 0.02);
    CHECK_THROWS(self_similar_measure({{{1.5, 0.0}}, {1.0}}, 10));
}

TEST_CASE("property: stationarity residual of self-similar measures") {
    Rng rng(42);
    for (int trial = 0; trial < 10; ++trial) {
        const int k = 2 + static_cast<int>(rng.below(2));
        WeightedIFS ifs;
        double total = 0.0;
        for (int j = 0; j < k; ++j) {
            const double r = rng.uniform(0.2, 0.45);
            ifs.maps.push_back({rng.uniform() < 0.3 ? -r : r, rng.uniform(0.0, 0.5)});
            ifs.p.push_back(rng.uniform() + 0.1);
            total += ifs.p.back();
        }
        for (auto& p : ifs.p) p /= total;
        const int n = 14;
        const auto mu = self_similar_measure(ifs, n);
        // sum_j p_j phi_j mu against mu, both at level n-2. The pushed copy is computed at n+4 so
        // the proportional splitting of straddling cells does not dominate the residual.
        const auto fine = self_similar_measure(ifs, n + 4);
        std::vector<std::pair<double, DyadicMeasure1D>> parts;
        for (std::size_t j = 0; j < ifs.maps.size(); ++j) {
            parts.emplace_back(ifs.p[j], coarsen_to(pushforward_affine(fine, ifs.maps[j]), n - 2));
        }
        CHECK(total_variation(mixture(parts), coarsen_to(mu, n - 2)) < 0.02);
    }
}

TEST_CASE("stationary measures") {
    const FiniteSampler dirac(WeightedIFS{{{0.5, 0.0}}, {1.0}});
    const auto d = stationary_measure(dirac, 12, 2000);
    REQUIRE(d.measure.size() == 1);
    CHECK(d.measure.cells()[0].k == 0);

    const FiniteSampler halves(WeightedIFS{{{0.5, 0.0}, {0.5, 0.5}}, {0.5, 0.5}});
    const auto u = stationary_measure(halves, 16, 1000000, {3, 4, 0.5});
    CHECK(std::abs(entropy_dim_estimate(u.measure, 16).slope - 1.0) <= 0.03);
    CHECK(u.max_standard_error < 0.001);

    const EndpointSampler ends(1.0 / 3.0, 0.5);
    const auto e = stationary_measure(ends, 16, 200000, {5, 4, 0.5});
    CHECK(entropy_dim_estimate(e.measure, 16).slope > 0.6);

    // Same seed, same histogram, whatever the worker count.
    const auto a = stationary_measure(ends, 12, 50000, {9, 1, 0.5});
    const auto b = stationary_measure(ends, 12, 50000, {9, 3, 0.5});
    CHECK(a.measure == b.measure);

    const auto small = stationary_measure(halves, 8, 100);
    CHECK_FALSE(small.warnings.empty());
}

TEST_CASE("sampler JSON") {
    const auto f = sampler_from_json(R"({"kind":"finite","maps":[[0.5,0],[0.5,0.5]],"p":[0.5,0.5]})");
    CHECK(f->r1() == 0.5);
    const auto b = sampler_from_json(R"({"kind":"box","ratio_range":[0.4,0.5],"t_range":[0,1]})");
    CHECK(b->r0() == 0.4);
    CHECK(b->t_hi() == 1.0);
    CHECK_THROWS(sampler_from_json(R"({"kind":"nope"})"));
}

TEST_CASE("superadditivity") {
    const std::vector<int> grid{4, 8, 12, 16};
    const auto u = superadditivity_check(DyadicMeasure1D::uniform_unit(16), grid);
    CHECK(u.constant <= 1e-9);
    CHECK(u.passes);
    const auto c = superadditivity_check(middle_third_cantor(16), grid);
    CHECK(c.constant <= 2.0);
    const auto b = superadditivity_check(self_similar_measure({{{0.5, 0.0}, {0.5, 0.5}}, {0.3, 0.7}}, 16), grid);
    CHECK(b.constant <= 2.0);
    for (const auto& row : c.pairs) CHECK(row.m + row.n <= 16);
}

TEST_CASE("stationary porosity") {
    const auto c = stationary_porosity_check(middle_third_cantor(20), 0.1, 12, 8);
    CHECK(c.verdict.passes);
    CHECK(std::abs(c.alpha - kCantorDim) <= 0.02);

    const auto u = stationary_porosity_check(DyadicMeasure1D::uniform_unit(20), 0.1, 12, 8);
    CHECK(u.verdict.passes);
    CHECK(u.alpha == doctest::Approx(1.0));

    const auto d = stationary_porosity_check(DyadicMeasure1D::dirac(20, 77), 0.1, 12, 6);
    CHECK(d.verdict.passes);
    CHECK(d.alpha == 0.0);
}

TEST_CASE("half-interval normalization") {
    const auto [n0, k0] = half_interval_normalization(DyadicMeasure1D::uniform(10, 0, 512));
    CHECK(n0 == 0);
    CHECK(k0 == 0);
    const auto [n1, k1] = half_interval_normalization(DyadicMeasure1D::uniform_unit(10));
    CHECK(n1 == 1);
    CHECK(k1 == 0);
    const auto [n2, k2] = half_interval_normalization(DyadicMeasure1D::uniform(10, -2048, -1900));
    CHECK(k2 == 2);
    CHECK(n2 == 0);
}
