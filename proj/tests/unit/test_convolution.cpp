#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "msl/convolution.hpp"
#include "msl/entropy.hpp"
#include "msl/measure.hpp"
#include "msl/random.hpp"
#include "msl/stationary.hpp"

using namespace msl;

namespace {

DyadicMeasure1D random_measure(Rng& rng, int level, int count) {
    std::vector<Cell> cells;
    for (int j = 0; j < count; ++j) {
        cells.push_back({static_cast<std::int64_t>(rng.below(std::uint64_t{1} << level)), rng.uniform() + 1e-3});
    }
    return DyadicMeasure1D::from_cells(level, std::move(cells));
}

// Random points of the G-cell (k1, k2) at level i, resolved at level i + m.
DyadicMeasureG random_g_component(Rng& rng, int i, int m, std::int64_t k1, std::int64_t k2, int count) {
    std::vector<CellG> cells;
    const auto side = std::uint64_t{1} << m;
    for (int j = 0; j < count; ++j) {
        cells.push_back({(k1 << m) + static_cast<std::int64_t>(rng.below(side)),
                         (k2 << m) + static_cast<std::int64_t>(rng.below(side)), rng.uniform() + 0.1});
    }
    return DyadicMeasureG::from_cells(i + m, std::move(cells));
}

}  // namespace

TEST_CASE("convolve_R with a Dirac at 0 shifts by one cell label") {
    Rng rng(31);
    const auto mu = random_measure(rng, 10, 50);
    const auto out = convolve_R(DyadicMeasure1D::dirac(10, 0), mu);
    REQUIRE(out.size() == mu.size());
    for (std::size_t j = 0; j < mu.size(); ++j) {
        CHECK(out.cells()[j].k == mu.cells()[j].k + 1);
        CHECK(out.cells()[j].mass == doctest::Approx(mu.cells()[j].mass));
    }
    CHECK_THROWS(convolve_R(DyadicMeasure1D::dirac(9, 0), mu));
}

TEST_CASE("uniform * uniform is the triangle law") {
    const int n = 10;
    const auto u = DyadicMeasure1D::uniform_unit(n);
    const auto tri = convolve_R(u, u);
    // Closed form: density min(y, 2-y) on [0,2).
    const double w = std::ldexp(1.0, -n);
    double h_closed = 0.0;
    for (std::int64_t j = 0; j < (std::int64_t{2} << n); ++j) {
        const double a = j * w, b = a + w;
        auto cdf = [](double y) { return y <= 1 ? y * y / 2 : 1 - (2 - y) * (2 - y) / 2; };
        const double p = cdf(b) - cdf(a);
        if (p > 0) h_closed -= p * std::log2(p);
    }
    CHECK(std::abs(entropy(tri, n).value_bits - h_closed) <= 2.0);
}

TEST_CASE("Cantor self-convolution dimension") {
    const auto mu = middle_third_cantor(18);
    const auto r = entropy_dim_estimate(convolve_R(mu, mu), 18);
    CHECK(std::abs(r.slope - 1.5 / std::log2(3.0)) <= 0.02);
}

TEST_CASE("property: convolve_R is commutative cell for cell and never loses more than 2 bits") {
    Rng rng(32);
    for (int trial = 0; trial < 60; ++trial) {
        const int level = 6 + static_cast<int>(rng.below(8));
        const auto a = random_measure(rng, level, 1 + static_cast<int>(rng.below(300)));
        const auto b = random_measure(rng, level, 1 + static_cast<int>(rng.below(300)));
        const auto ab = convolve_R(a, b);
        CHECK(ab == convolve_R(b, a));
        CHECK(entropy(ab, level).value_bits >= entropy(b, level).value_bits - 2.0);
        CHECK(entropy(ab, level).value_bits >= entropy(a, level).value_bits - 2.0);
    }
}

TEST_CASE("property: multiscale lower bound for additive convolution") {
    Rng rng(33);
    for (int trial = 0; trial < 8; ++trial) {
        const int n = 8, m = 2, level = n + m;
        const auto nu = random_measure(rng, level, 1 + static_cast<int>(rng.below(60)));
        const auto mu = random_measure(rng, level, 1 + static_cast<int>(rng.below(60)));
        const double lhs = entropy(convolve_R(nu, mu), n).value_bits / n;
        double rhs = 0.0;
        for (int i = 1; i <= n; ++i) {
            for_each_component(nu, i, [&](const ComponentView& a) {
                const auto na = DyadicMeasure1D::from_cells(level, {a.cells.begin(), a.cells.end()});
                for_each_component(mu, i, [&](const ComponentView& b) {
                    const auto mb = DyadicMeasure1D::from_cells(level, {b.cells.begin(), b.cells.end()});
                    rhs += a.mass * b.mass * entropy(convolve_R(na, mb), i + m).value_bits / m;
                });
            });
        }
        rhs /= n;
        CHECK(lhs >= rhs - 4.0 * (1.0 / m + static_cast<double>(m) / n));
    }
}

TEST_CASE("act_convolve") {
    Rng rng(34);
    const auto mu = random_measure(rng, 12, 300);
    // A Dirac in G acts like the push-forward by its midpoint map.
    for (const auto& [k1, k2] : std::vector<std::pair<std::int64_t, std::int64_t>>{{0, 0}, {-700, 1500}}) {
        const auto nu = DyadicMeasureG::dirac(12, k1, k2);
        const auto phi = nu.midpoint_map(nu.cells().front());
        const auto a = act_convolve(nu, mu);
        const auto b = pushforward_affine(mu, phi);
        REQUIRE(a.level() == b.level());
        CHECK(total_variation(coarsen(a, 1), coarsen(b, 1)) <= 0.5);
        CHECK(std::abs(entropy(a, 12).value_bits - entropy(b, 12).value_bits) <= 1.0);
    }
    // Translations t in [0,1) smear the Cantor measure into something of full dimension.
    std::vector<CellG> tr;
    for (std::int64_t k = 0; k < (1 << 14); ++k) tr.push_back({-1, k, 1.0});
    const auto smooth = act_convolve(DyadicMeasureG::from_cells(14, tr), middle_third_cantor(14));
    CHECK(std::abs(entropy_dim_estimate(smooth, 14).slope - 1.0) <= 0.02);
}

TEST_CASE("derivative") {
    auto d = derivative({0.0, 0.0, 2.0});
    CHECK(d.a_s == 2.0);
    CHECK(d.a_t == 1.0);
    CHECK(d.b == 1.0);
    d = derivative({0.0, 5.0, 0.0});
    CHECK(d.a_s == 0.0);
    CHECK(d.b == 1.0);
    d = derivative({std::log(2.0), 1.0, 3.0});
    CHECK(d.a_s == doctest::Approx(6.0));
    CHECK(d.b == doctest::Approx(2.0));
}

TEST_CASE("property: first-order expansion error is quadratic on the unit box") {
    Rng rng(35);
    for (int trial = 0; trial < 1000; ++trial) {
        const ActionBase base{rng.uniform(), rng.uniform(), rng.uniform()};
        const double s = rng.uniform(), t = rng.uniform(), x = rng.uniform();
        const auto d = derivative(base);
        const double exact = std::exp(s) * x + t;
        const double approx = std::exp(base.s) * base.x + base.t + d.a_s * (s - base.s) + d.a_t * (t - base.t) +
                              d.b * (x - base.x);
        const double dphi2 = (s - base.s) * (s - base.s) + (t - base.t) * (t - base.t);
        const double dx2 = (x - base.x) * (x - base.x);
        CHECK(std::abs(exact - approx) <= 8.0 * (dphi2 + dx2) + 1e-15);
    }
}

TEST_CASE("linearized_convolve") {
    const int level = 12;
    const ActionBase base{0.0, 0.0, 0.5};
    Rng rng(36);
    const auto mu = random_measure(rng, level, 40);
    // Dirac at the base map: a translate of mu.
    const auto nu = DyadicMeasureG::dirac(level, 0, 0);
    const auto lin = linearized_convolve(nu, mu, base);
    CHECK(lin.size() <= mu.size());
    CHECK(std::abs(entropy(lin, level).value_bits - entropy(mu, level).value_bits) <= 1.0);

    // Along ker A, A = (x, 1) = (0.5, 1): direction (2, -1). The image collapses.
    std::vector<CellG> ker;
    for (std::int64_t j = 0; j < 64; ++j) ker.push_back({2 * j, -j, 1.0});
    const auto kernel_image =
        linearized_convolve(DyadicMeasureG::from_cells(level, ker), DyadicMeasure1D::dirac(level, 0), base);
    CHECK(entropy(kernel_image, level).value_bits <= 1.0);

    // Transversal spread of k bits keeps at least k/2 - 2 bits.
    std::vector<CellG> trans;
    for (std::int64_t j = 0; j < 256; ++j) trans.push_back({j, j, 1.0});
    const auto spread = DyadicMeasureG::from_cells(level, trans);
    const auto img = linearized_convolve(spread, DyadicMeasure1D::dirac(level, 0), base);
    CHECK(entropy(img, level).value_bits >= entropy(spread, level).value_bits / 2 - 2);
}

TEST_CASE("linearization gap") {
    const ActionBase base{-0.5, 0.25, 0.5};
    CHECK(linearization_gap(DyadicMeasureG::dirac(16, -4096, 2048), DyadicMeasure1D::dirac(16, 32768), base, 8, 8) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS(linearization_gap(DyadicMeasureG::dirac(16, 0, 0), DyadicMeasure1D::dirac(16, 0), base, 6, 7));

    Rng rng(37);
    std::vector<double> gaps;
    for (int i = 8; i <= 10; ++i) {
        double worst = 0.0;
        for (int trial = 0; trial < 4; ++trial) {
            // Components at the level-i cells containing the base point.
            const auto k1 = static_cast<std::int64_t>(std::floor(std::ldexp(base.s, i)));
            const auto k2 = static_cast<std::int64_t>(std::floor(std::ldexp(base.t, i)));
            const auto kx = static_cast<std::int64_t>(std::floor(std::ldexp(base.x, i)));
            const auto nu = random_g_component(rng, i, i, k1, k2, 1500);
            const auto mu = DyadicMeasure1D::uniform(2 * i, kx << i, (kx + 1) << i);
            const ActionBase cell_base{std::ldexp(k1 + 0.5, -i), std::ldexp(k2 + 0.5, -i), std::ldexp(kx + 0.5, -i)};
            worst = std::max(worst, linearization_gap(nu, mu, cell_base, i, i));
        }
        CHECK(worst <= 2.0);
        gaps.push_back(worst);
    }
    // No blow-up as i grows.
    CHECK(gaps.back() <= gaps.front() + 1.0);
}

TEST_CASE("separation lemma") {
    const int level = 8;
    std::vector<CellG> sq;
    for (int a = 0; a < 256; ++a) {
        for (int b = 0; b < 256; ++b) sq.push_back({a, b, 1.0});
    }
    const auto theta = DyadicMeasureG::from_cells(level, sq);
    // g from base points x = 0 and x = 1 at s = 0: A = (0, 1) and (1, 1).
    const LinearFunctional g1{0.0, 1.0}, g2{1.0, 1.0};
    const auto v = separation_entropy_bound(theta, g1, g2, level);
    CHECK(v.holds);
    CHECK(v.h_g1 >= 0.5 * v.h_theta - 2 * std::log2(v.c) - 4);

    const auto d = separation_entropy_bound(DyadicMeasureG::dirac(level, 3, 4), g1, g2, level);
    CHECK(d.holds);

    std::vector<CellG> line;
    for (int a = 0; a < 256; ++a) line.push_back({a, 7, 1.0});
    const auto ker = separation_entropy_bound(DyadicMeasureG::from_cells(level, line), g1, g2, level);
    CHECK(ker.h_g1 == 0.0);
    CHECK(ker.h_g2 >= 0.5 * ker.h_theta - 2 * std::log2(ker.c) - 4);
    CHECK_THROWS(separation_entropy_bound(theta, g1, {0.0, 2.0}, level));
}

TEST_CASE("growth harness") {
    const auto mu = middle_third_cantor(14);
    std::vector<CellG> tr;
    for (std::int64_t k = 0; k < (1 << 14); ++k) tr.push_back({-1, k, 1.0});
    const auto r = entropy_growth_experiment(DyadicMeasureG::from_cells(14, tr), mu, 8, 14);
    CHECK(std::abs(r.rows.back().gap - (1.0 - std::log(2.0) / std::log(3.0))) <= 0.05);
    CHECK(r.min_tail_gap > 0.2);
    CHECK(r.porosity.passes);

    const auto d = entropy_growth_experiment(DyadicMeasureG::dirac(14, -1, 0), mu, 8, 14);
    for (const auto& row : d.rows) CHECK(std::abs(row.gap) <= 2.0 / row.n);
    CHECK_FALSE(d.warnings.empty());  // a Dirac has no scale entropy

    // Cantor-distributed scalings about the point 0 (its stabilizer line t = 0).
    const auto c16 = middle_third_cantor(16);
    std::vector<CellG> stab;
    for (const auto& c : c16.cells()) stab.push_back({-1 - c.k, 0, c.mass});
    const auto s = entropy_growth_experiment(DyadicMeasureG::from_cells(16, stab), c16, 16, 16);
    CHECK(s.rows.back().gap > 0.0);

    const std::string csv = growth_csv(r);
    CHECK(csv.rfind("n,H_mu_over_n,H_conv_over_n,gap\n", 0) == 0);
}
