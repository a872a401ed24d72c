#include "msl/convolution.hpp"

#include "accumulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace msl {

namespace {

// Total order used to make convolve_R symmetric in its arguments bit for bit.
bool canonical_before(const DyadicMeasure1D& a, const DyadicMeasure1D& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (std::size_t j = 0; j < a.size(); ++j) {
        const auto& x = a.cells()[j];
        const auto& y = b.cells()[j];
        if (x.k != y.k) return x.k < y.k;
        if (x.mass != y.mass) return x.mass < y.mass;
    }
    return false;
}

std::int64_t floor_index(double y) { return static_cast<std::int64_t>(std::floor(y)); }

// Image of nu x mu under (cell of nu, x) -> u(cell) + scale * x, at level n.
template <class U>
DyadicMeasure1D pair_image(const DyadicMeasureG& nu, const DyadicMeasure1D& mu, double scale, U u) {
    const int n = mu.level();
    const double two_n = std::ldexp(1.0, n);
    const double xlo = mu.midpoint(mu.cells().front().k);
    const double xhi = mu.midpoint(mu.cells().back().k);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    std::vector<double> shifts;
    shifts.reserve(nu.size());
    for (const auto& g : nu.cells()) {
        const double base = u(g);
        shifts.push_back(base);
        for (double xe : {xlo, xhi}) {
            const double y = (base + scale * xe) * two_n;
            lo = std::min(lo, y);
            hi = std::max(hi, y);
        }
    }
    detail::Accumulator acc(floor_index(lo) - 1, floor_index(hi) + 1);
    for (std::size_t j = 0; j < nu.size(); ++j) {
        const double w = nu.cells()[j].mass;
        const double b = shifts[j];
        for (const auto& c : mu.cells()) {
            acc.add(floor_index(std::ldexp(b + scale * mu.midpoint(c.k), n)), w * c.mass);
        }
    }
    return acc.finish(n);
}

}  // namespace

DyadicMeasure1D convolve_R(const DyadicMeasure1D& nu, const DyadicMeasure1D& mu) {
    if (nu.level() != mu.level()) throw std::invalid_argument("convolve_R: level mismatch");
    if (nu.empty() || mu.empty()) throw std::invalid_argument("convolve_R: empty measure");
    const auto& [p, q] = canonical_before(mu, nu) ? std::tie(mu, nu) : std::tie(nu, mu);
    // Midpoints (j+1/2)2^-n and (k+1/2)2^-n sum to (j+k+1)2^-n, the left edge of cell j+k+1.
    detail::Accumulator acc(p.cells().front().k + q.cells().front().k + 1, p.cells().back().k + q.cells().back().k + 1);
    for (const auto& a : p.cells()) {
        for (const auto& b : q.cells()) acc.add(a.k + b.k + 1, a.mass * b.mass);
    }
    return acc.finish(nu.level());
}

DyadicMeasure1D act_convolve(const DyadicMeasureG& nu, const DyadicMeasure1D& mu) {
    if (nu.level() != mu.level()) throw std::invalid_argument("act_convolve: level mismatch");
    if (nu.size() == 0 || mu.empty()) throw std::invalid_argument("act_convolve: empty measure");
    const int n = mu.level();
    const double two_n = std::ldexp(1.0, n);
    const double xlo = mu.midpoint(mu.cells().front().k);
    const double xhi = mu.midpoint(mu.cells().back().k);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    std::vector<AffineMap> maps;
    maps.reserve(nu.size());
    for (const auto& g : nu.cells()) {
        const auto phi = nu.midpoint_map(g);
        maps.push_back(phi);
        for (double xe : {xlo, xhi}) {
            lo = std::min(lo, phi(xe) * two_n);
            hi = std::max(hi, phi(xe) * two_n);
        }
    }
    detail::Accumulator acc(floor_index(lo) - 1, floor_index(hi) + 1);
    for (std::size_t j = 0; j < nu.size(); ++j) {
        const double w = nu.cells()[j].mass;
        const auto& phi = maps[j];
        for (const auto& c : mu.cells()) acc.add(floor_index(std::ldexp(phi(mu.midpoint(c.k)), n)), w * c.mass);
    }
    return acc.finish(n);
}

ActionDerivative derivative(const ActionBase& base) {
    const double es = std::exp(base.s);
    return {es * base.x, 1.0, es, base};
}

DyadicMeasure1D first_order_image(const DyadicMeasureG& nu, const DyadicMeasure1D& mu, const ActionBase& base) {
    if (nu.level() != mu.level()) throw std::invalid_argument("first_order_image: level mismatch");
    const auto d = derivative(base);
    const double f0 = d.b * base.x + base.t;
    const double inv = std::ldexp(1.0, -nu.level());
    return pair_image(nu, mu, d.b, [&](const CellG& g) {
        const double s = (static_cast<double>(g.k1) + 0.5) * inv;
        const double t = (static_cast<double>(g.k2) + 0.5) * inv;
        return f0 + d.a_s * (s - base.s) + d.a_t * (t - base.t) - d.b * base.x;
    });
}

DyadicMeasure1D linearized_convolve(const DyadicMeasureG& nu, const DyadicMeasure1D& mu, const ActionBase& base) {
    if (nu.level() != mu.level()) throw std::invalid_argument("linearized_convolve: level mismatch");
    const auto d = derivative(base);
    const double inv = std::ldexp(1.0, -nu.level());
    return pair_image(nu, mu, 1.0, [&](const CellG& g) {
        const double s = (static_cast<double>(g.k1) + 0.5) * inv;
        const double t = (static_cast<double>(g.k2) + 0.5) * inv;
        return (d.a_s * (s - base.s) + d.a_t * (t - base.t)) / d.b;
    });
}

double linearization_gap(const DyadicMeasureG& nu, const DyadicMeasure1D& mu, const ActionBase& base, int i, int m) {
    if (m > i) throw std::invalid_argument("linearization_gap: m > i violates the error-term contract");
    const int lvl = i + m;
    if (lvl > mu.level()) throw std::invalid_argument("linearization_gap: i + m exceeds resolution");
    const auto exact = act_convolve(nu, mu);
    const auto lin = first_order_image(nu, mu, base);
    return std::abs(entropy(exact, lvl).value_bits - entropy(lin, lvl).value_bits);
}

DyadicMeasure1D pushforward_linear(const DyadicMeasureG& theta, const LinearFunctional& g, int level) {
    if (level > theta.level()) throw std::invalid_argument("pushforward_linear: level exceeds resolution");
    const double inv = std::ldexp(1.0, -theta.level());
    std::vector<Cell> cells;
    cells.reserve(theta.size());
    for (const auto& c : theta.cells()) {
        const double s = (static_cast<double>(c.k1) + 0.5) * inv;
        const double t = (static_cast<double>(c.k2) + 0.5) * inv;
        cells.push_back({floor_index(std::ldexp(g.alpha * s + g.beta * t, level)), c.mass});
    }
    return DyadicMeasure1D::from_cells(level, std::move(cells), false);
}

SeparationVerdict separation_entropy_bound(const DyadicMeasureG& theta, const LinearFunctional& g1,
                                           const LinearFunctional& g2, int level) {
    const double det = g1.alpha * g2.beta - g1.beta * g2.alpha;
    if (std::abs(det) < 1e-12) throw std::invalid_argument("separation_entropy_bound: singular pair");
    // Singular values of [[a1, b1], [a2, b2]].
    const double fro = g1.alpha * g1.alpha + g1.beta * g1.beta + g2.alpha * g2.alpha + g2.beta * g2.beta;
    const double disc = std::sqrt(std::max(0.0, fro * fro - 4.0 * det * det));
    const double smax = std::sqrt((fro + disc) / 2.0);
    const double smin = std::abs(det) / smax;
    SeparationVerdict v;
    v.c = std::max({1.0, smax, 1.0 / smin});
    v.h_theta = entropy(theta, level).value_bits;
    v.h_g1 = entropy(pushforward_linear(theta, g1, level), level).value_bits;
    v.h_g2 = entropy(pushforward_linear(theta, g2, level), level).value_bits;
    v.bound = 0.5 * v.h_theta - 2.0 * std::log2(v.c) - 4.0;
    v.holds = std::max(v.h_g1, v.h_g2) >= v.bound;
    return v;
}

GrowthReport entropy_growth_experiment(const DyadicMeasureG& nu, const DyadicMeasure1D& mu, int n_lo, int n_hi,
                                       const GrowthParams& params) {
    if (n_lo < 1 || n_lo > n_hi) throw std::invalid_argument("entropy_growth_experiment: bad level range");
    if (n_hi > nu.level() || n_hi > mu.level()) {
        throw std::invalid_argument("entropy_growth_experiment: n range exceeds resolution");
    }
    GrowthReport r;
    const int pm = std::min(params.m, n_hi);
    r.porosity = entropy_porosity_test(coarsen_to(mu, n_hi), 1.0 - params.epsilon, params.delta, pm, 0, n_hi - pm);
    if (!r.porosity.passes) r.warnings.push_back("mu fails the (1-epsilon)-entropy porosity precondition");
    r.nu_scale_entropy = entropy(nu, n_hi).value_bits / n_hi;
    if (!(r.nu_scale_entropy > params.epsilon)) r.warnings.push_back("nu has scale entropy below epsilon");
    const double lo_s = std::log(0.25);
    const auto top = coarsen_to(nu, n_hi);
    for (const auto& c : top.cells()) {
        const double s = std::ldexp(static_cast<double>(c.k1) + 0.5, -n_hi);
        if (s < lo_s || s >= 0.0) {
            r.warnings.push_back("nu charges maps with norm outside [0.25, 1)");
            break;
        }
    }
    for (int n = n_lo; n <= n_hi; ++n) {
        const auto nu_n = coarsen_to(nu, n);
        const auto mu_n = coarsen_to(mu, n);
        const double hm = entropy(mu_n, n).value_bits / n;
        const double hc = entropy(act_convolve(nu_n, mu_n), n).value_bits / n;
        r.rows.push_back({n, hm, hc, hc - hm});
    }
    const std::size_t tail = (r.rows.size() + 1) / 2;
    r.min_tail_gap = std::numeric_limits<double>::infinity();
    for (std::size_t j = r.rows.size() - tail; j < r.rows.size(); ++j) {
        r.min_tail_gap = std::min(r.min_tail_gap, r.rows[j].gap);
    }
    return r;
}

std::string growth_csv(const GrowthReport& r) {
    std::string s = "n,H_mu_over_n,H_conv_over_n,gap\n";
    char buf[128];
    for (const auto& row : r.rows) {
        std::snprintf(buf, sizeof buf, "%d,%.12f,%.12f,%.12f\n", row.n, row.h_mu_over_n, row.h_conv_over_n, row.gap);
        s += buf;
    }
    return s;
}

}  // namespace msl
