#include "msl/stationary.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "accumulator.hpp"

namespace msl {

namespace {

constexpr double kBoundSlack = 1e-12;

bool is_dyadic_at(double v, int n) {
    const double scaled = std::ldexp(v, n);
    return std::isfinite(scaled) && scaled == std::floor(scaled);
}

bool is_power_of_two_ratio(double a) {
    int e = 0;
    const double m = std::frexp(std::abs(a), &e);
    return m == 0.5;
}

// Uniform density on [lo, hi] split over level-L cells.
DyadicMeasure1D split_uniform(double lo, double hi, int level) {
    const double y0 = std::ldexp(lo, level);
    const double y1 = std::ldexp(hi, level);
    const auto a = static_cast<std::int64_t>(std::floor(y0));
    auto b = static_cast<std::int64_t>(std::ceil(y1)) - 1;
    if (b < a) b = a;
    std::vector<Cell> cells;
    for (std::int64_t j = a; j <= b; ++j) {
        const double ov = std::min(y1, static_cast<double>(j + 1)) - std::max(y0, static_cast<double>(j));
        if (ov > 0.0) cells.push_back({j, ov / (y1 - y0)});
    }
    return DyadicMeasure1D::from_sorted(level, std::move(cells));
}

// sum_phi p_phi phi(mu), treating mass as uniform inside each cell, at level `out`.
DyadicMeasure1D hutchinson_step(const DyadicMeasure1D& mu, const WeightedIFS& ifs, int out) {
    const int in = mu.level();
    const double scale = std::ldexp(1.0, out - in);
    double lo = 1e300, hi = -1e300;
    for (const auto& phi : ifs.maps) {
        for (std::int64_t k : {mu.cells().front().k, mu.cells().back().k + 1}) {
            const double y = phi.a * static_cast<double>(k) * scale + std::ldexp(phi.t, out);
            lo = std::min(lo, y);
            hi = std::max(hi, y);
        }
    }
    std::int64_t expected = 0;
    for (const auto& phi : ifs.maps) {
        expected += static_cast<std::int64_t>(mu.size()) * (2 + static_cast<std::int64_t>(phi.norm() * scale));
    }
    detail::Accumulator acc(static_cast<std::int64_t>(std::floor(lo)) - 1, static_cast<std::int64_t>(std::ceil(hi)) + 1,
                            expected);
    for (std::size_t f = 0; f < ifs.maps.size(); ++f) {
        const auto& phi = ifs.maps[f];
        const double w = ifs.p[f];
        const double tt = std::ldexp(phi.t, out);
        for (const auto& c : mu.cells()) {
            double y0 = phi.a * static_cast<double>(c.k) * scale + tt;
            double y1 = phi.a * static_cast<double>(c.k + 1) * scale + tt;
            if (y1 < y0) std::swap(y0, y1);
            const auto a = static_cast<std::int64_t>(std::floor(y0));
            auto b = static_cast<std::int64_t>(std::ceil(y1)) - 1;
            if (b <= a) {
                acc.add(a, w * c.mass);
                continue;
            }
            const double len = y1 - y0;
            for (std::int64_t j = a; j <= b; ++j) {
                const double ov = std::min(y1, static_cast<double>(j + 1)) - std::max(y0, static_cast<double>(j));
                if (ov > 0.0) acc.add(j, w * c.mass * (ov / len));
            }
        }
    }
    return acc.finish(out);
}

double max_cell_change(const DyadicMeasure1D& a, const DyadicMeasure1D& b) {
    const auto& x = a.cells();
    const auto& y = b.cells();
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() || j < y.size()) {
        if (j == y.size() || (i < x.size() && x[i].k < y[j].k)) {
            d = std::max(d, x[i++].mass);
        } else if (i == x.size() || y[j].k < x[i].k) {
            d = std::max(d, y[j++].mass);
        } else {
            d = std::max(d, std::abs(x[i++].mass - y[j++].mass));
        }
    }
    return d;
}

std::pair<double, double> json_pair(const nlohmann::json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != 2) throw std::invalid_argument(std::string("sampler: ") + key + " needs two numbers");
    return {v.at(0).get<double>(), v.at(1).get<double>()};
}

}  // namespace

// ---------------------------------------------------------------- IFS

void WeightedIFS::validate() const {
    if (maps.empty()) throw std::invalid_argument("IFS has no maps");
    if (maps.size() != p.size()) throw std::invalid_argument("IFS: maps and probabilities differ in length");
    double s = 0.0;
    for (double q : p) {
        if (!(q >= 0.0)) throw std::invalid_argument("IFS: negative probability");
        s += q;
    }
    if (std::abs(s - 1.0) > kNormTolerance) throw std::invalid_argument("IFS: probabilities do not sum to 1");
    for (const auto& phi : maps) {
        if (!(phi.norm() > 0.0) || !(phi.norm() < 1.0)) throw std::invalid_argument("IFS: non-contracting map");
    }
}

double WeightedIFS::r0() const {
    double r = 1.0;
    for (const auto& phi : maps) r = std::min(r, phi.norm());
    return r;
}

double WeightedIFS::r1() const {
    double r = 0.0;
    for (const auto& phi : maps) r = std::max(r, phi.norm());
    return r;
}

std::pair<double, double> attractor_hull(const std::vector<AffineMap>& maps) {
    if (maps.empty()) throw std::invalid_argument("attractor_hull: no maps");
    double r1 = 0.0, tmax = 0.0;
    for (const auto& phi : maps) {
        if (!(phi.norm() < 1.0)) throw std::invalid_argument("attractor_hull: non-contracting map");
        r1 = std::max(r1, phi.norm());
        tmax = std::max(tmax, std::abs(phi.t));
    }
    double lo = -tmax / (1.0 - r1);
    double hi = -lo;
    // Iterate B -> hull(U phi(B)); the hull of the attractor is the fixed point.
    for (int it = 0; it < 10000; ++it) {
        double nlo = 1e300, nhi = -1e300;
        for (const auto& phi : maps) {
            const double u = phi(lo), v = phi(hi);
            nlo = std::min({nlo, u, v});
            nhi = std::max({nhi, u, v});
        }
        const bool done = std::abs(nlo - lo) <= 1e-15 && std::abs(nhi - hi) <= 1e-15;
        lo = nlo;
        hi = nhi;
        if (done) break;
    }
    // Fixed points are exact members of the attractor; snap the hull to them when close.
    for (const auto& phi : maps) {
        const double fp = phi.t / (1.0 - phi.a);
        if (std::abs(fp - lo) < 1e-12) lo = fp;
        if (std::abs(fp - hi) < 1e-12) hi = fp;
    }
    return {lo, hi};
}

// ---------------------------------------------------------------- samplers

FiniteSampler::FiniteSampler(WeightedIFS ifs) : ifs_(std::move(ifs)) {
    ifs_.validate();
    double c = 0.0;
    for (double q : ifs_.p) {
        c += q;
        cumulative_.push_back(c);
    }
    t_lo_ = t_hi_ = ifs_.maps.front().t;
    for (const auto& phi : ifs_.maps) {
        t_lo_ = std::min(t_lo_, phi.t);
        t_hi_ = std::max(t_hi_, phi.t);
    }
}

AffineMap FiniteSampler::draw(Rng& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto j = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), ifs_.maps.size() - 1);
    return ifs_.maps[j];
}

std::string FiniteSampler::describe() const {
    nlohmann::json j;
    j["kind"] = "finite";
    j["maps"] = nlohmann::json::array();
    for (const auto& phi : ifs_.maps) j["maps"].push_back({phi.a, phi.t});
    j["p"] = ifs_.p;
    return j.dump();
}

BoxSampler::BoxSampler(double r0, double r1, double t0, double t1) : r0_(r0), r1_(r1), t0_(t0), t1_(t1) {
    if (!(r0 > 0.0) || !(r0 <= r1) || !(r1 < 1.0)) throw std::invalid_argument("box sampler: need 0 < r0 <= r1 < 1");
    if (!(t0 <= t1)) throw std::invalid_argument("box sampler: empty translation range");
}

AffineMap BoxSampler::draw(Rng& rng) const {
    const double a = rng.uniform(r0_, r1_);
    const double t = rng.uniform(t0_, t1_);
    return {a, t};
}

std::string BoxSampler::describe() const {
    nlohmann::json j;
    j["kind"] = "box";
    j["ratio_range"] = {r0_, r1_};
    j["t_range"] = {t0_, t1_};
    return j.dump();
}

EndpointSampler::EndpointSampler(double r0, double r1) : r0_(r0), r1_(r1) {
    if (!(r0 > 0.0) || !(r0 <= r1) || !(r1 < 1.0)) throw std::invalid_argument("endpoint sampler: need 0 < r0 <= r1 < 1");
}

AffineMap EndpointSampler::draw(Rng& rng) const {
    const double a = rng.uniform(r0_, r1_);
    return {a, (rng.next() >> 63) ? 1.0 - a : 0.0};
}

std::string EndpointSampler::describe() const {
    nlohmann::json j;
    j["kind"] = "endpoints";
    j["ratio_range"] = {r0_, r1_};
    return j.dump();
}

std::unique_ptr<MapSampler> sampler_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "finite") {
        WeightedIFS ifs;
        for (const auto& m : j.at("maps")) ifs.maps.push_back({m.at(0).get<double>(), m.at(1).get<double>()});
        if (j.contains("p")) {
            ifs.p = j.at("p").get<std::vector<double>>();
        } else {
            ifs.p.assign(ifs.maps.size(), 1.0 / static_cast<double>(ifs.maps.size()));
        }
        return std::make_unique<FiniteSampler>(std::move(ifs));
    }
    if (kind == "box") {
        const auto [r0, r1] = json_pair(j, "ratio_range");
        const auto [t0, t1] = json_pair(j, "t_range");
        return std::make_unique<BoxSampler>(r0, r1, t0, t1);
    }
    if (kind == "endpoints") {
        const auto [r0, r1] = json_pair(j, "ratio_range");
        return std::make_unique<EndpointSampler>(r0, r1);
    }
    throw std::invalid_argument("unknown sampler kind '" + kind + "'");
}

// ---------------------------------------------------------------- stopping times

int stopping_time_cap(int n, double r1) {
    return static_cast<int>(std::ceil(n / std::log2(1.0 / r1) - 1e-12));
}

StoppingResult stopping_time_compose(const MapSampler& sampler, int n, Rng& rng) {
    const double r1 = sampler.r1();
    if (!(r1 < 1.0)) throw std::invalid_argument("stopping_time_compose: sampler is not contracting");
    const double target = std::ldexp(1.0, -n);
    const int cap = stopping_time_cap(n, r1) + 1;
    StoppingResult res;
    while (res.map.norm() > target) {
        const auto phi = sampler.draw(rng);
        const double r = phi.norm();
        if (r < sampler.r0() * (1 - kBoundSlack) || r > r1 * (1 + kBoundSlack) ||
            phi.t < sampler.t_lo() - kBoundSlack || phi.t > sampler.t_hi() + kBoundSlack) {
            throw std::runtime_error("sampler drew a map outside its declared bounds");
        }
        res.map = compose(res.map, phi);
        if (++res.tau > cap) throw std::runtime_error("stopping time exceeded its bound");
    }
    return res;
}

// ---------------------------------------------------------------- self-similar measures

DyadicMeasure1D self_similar_measure(const WeightedIFS& ifs, int n) {
    ifs.validate();
    if (n < 0 || n > kMaxLevelR) throw std::invalid_argument("self_similar_measure: level out of range");
    const auto [lo, hi] = attractor_hull(ifs.maps);
    if (hi - lo <= 0.0) return DyadicMeasure1D::dirac(n, static_cast<std::int64_t>(std::floor(std::ldexp(lo, n))));

    // Dyadic ratios, translations and hull keep every step exact at level n.
    bool exact = is_dyadic_at(lo, n) && is_dyadic_at(hi, n);
    for (const auto& phi : ifs.maps) exact = exact && is_power_of_two_ratio(phi.a) && is_dyadic_at(phi.t, n);
    const int top = std::min(n + (exact ? 0 : 3), kMaxLevelR);

    const int l0 = std::clamp(static_cast<int>(std::floor(-std::log2(hi - lo))), 0, top);
    const double step = std::log2(1.0 / ifs.r1());
    const int max_depth = static_cast<int>(std::ceil(top / step)) + 8;
    auto current = split_uniform(lo, hi, l0);
    for (int j = 1; j <= max_depth; ++j) {
        const int next = std::min(top, l0 + static_cast<int>(std::floor(j * step)));
        auto updated = hutchinson_step(current, ifs, next);
        const bool settled = current.level() == top && max_cell_change(current, updated) < 1e-10;
        current = std::move(updated);
        if (settled) break;
    }
    auto out = coarsen_to(current, n);
    return DyadicMeasure1D::from_cells(n, std::vector<Cell>(out.cells()), true);
}

DyadicMeasure1D middle_third_cantor(int n) {
    if (n < 0 || n > kMaxLevelR) throw std::invalid_argument("middle_third_cantor: level out of range");
    const std::int64_t cells = std::int64_t{1} << n;
    const std::int64_t mask = cells - 1;
    // Cantor function at k/2^n from the ternary digits of k/2^n.
    auto cdf = [&](std::int64_t k) {
        if (k >= cells) return 1.0;
        std::int64_t r = k;
        double s = 0.0;
        for (int j = 1; j <= 64; ++j) {
            r *= 3;
            const std::int64_t d = r >> n;
            r &= mask;
            if (d == 1) return s + std::ldexp(1.0, -j);
            if (d == 2) s += std::ldexp(1.0, -j);
            if (r == 0) break;
        }
        return s;
    };
    std::vector<Cell> out;
    double prev = cdf(0);
    for (std::int64_t k = 0; k < cells; ++k) {
        const double next = cdf(k + 1);
        if (next > prev) out.push_back({k, next - prev});
        prev = next;
    }
    return DyadicMeasure1D::from_cells(n, std::move(out), true);
}

// ---------------------------------------------------------------- stationary measures

StationaryResult stationary_measure(const MapSampler& sampler, int n, std::int64_t samples,
                                    const StationaryOptions& opts) {
    if (samples < 1) throw std::invalid_argument("stationary_measure: need at least one sample");
    if (n < 0 || n > kMaxLevelR) throw std::invalid_argument("stationary_measure: level out of range");
    if (!(sampler.r1() < 1.0)) throw std::invalid_argument("stationary_measure: sampler is not contracting");
    StationaryResult res;
    if (samples < 1000) res.warnings.push_back("fewer than 1000 samples; cell masses are unreliable");

    constexpr std::int64_t kChunk = std::int64_t{1} << 15;
    const std::int64_t chunks = (samples + kChunk - 1) / kChunk;
    std::vector<std::vector<std::int64_t>> hits(static_cast<std::size_t>(chunks));
    std::vector<int> max_tau(static_cast<std::size_t>(chunks), 0);
    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto work = [&] {
        for (std::int64_t c = next++; c < chunks && !failed; c = next++) {
            try {
                auto rng = Rng::stream(opts.seed, static_cast<std::uint64_t>(c));
                const std::int64_t count = std::min(kChunk, samples - c * kChunk);
                auto& out = hits[static_cast<std::size_t>(c)];
                out.reserve(static_cast<std::size_t>(count));
                for (std::int64_t s = 0; s < count; ++s) {
                    const auto st = stopping_time_compose(sampler, n + 4, rng);
                    max_tau[static_cast<std::size_t>(c)] = std::max(max_tau[static_cast<std::size_t>(c)], st.tau);
                    out.push_back(static_cast<std::int64_t>(std::floor(std::ldexp(st.map(opts.x0), n))));
                }
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    const int workers = std::max(1, std::min<int>(opts.workers, static_cast<int>(chunks)));
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    std::vector<std::int64_t> all;
    all.reserve(static_cast<std::size_t>(samples));
    for (const auto& h : hits) all.insert(all.end(), h.begin(), h.end());
    std::sort(all.begin(), all.end());
    std::vector<Cell> cells;
    const double total = static_cast<double>(samples);
    for (std::size_t b = 0; b < all.size();) {
        std::size_t e = b;
        while (e < all.size() && all[e] == all[b]) ++e;
        cells.push_back({all[b], static_cast<double>(e - b) / total});
        b = e;
    }
    res.measure = DyadicMeasure1D::from_sorted(n, std::move(cells));
    res.samples = samples;
    for (const auto& c : res.measure.cells()) {
        res.max_standard_error = std::max(res.max_standard_error, std::sqrt(c.mass / total));
    }
    res.max_tau = *std::max_element(max_tau.begin(), max_tau.end());
    return res;
}

// ---------------------------------------------------------------- checks

SuperadditivityReport superadditivity_check(const DyadicMeasure1D& mu, const std::vector<int>& grid, double c_bound) {
    SuperadditivityReport r;
    std::vector<double> a(static_cast<std::size_t>(mu.level()) + 1);
    for (int n = 0; n <= mu.level(); ++n) {
        a[static_cast<std::size_t>(n)] = entropy(mu, n).value_bits;
        r.a.emplace_back(n, a[static_cast<std::size_t>(n)]);
    }
    for (std::size_t x = 0; x < grid.size(); ++x) {
        for (std::size_t y = x; y < grid.size(); ++y) {
            const int m = grid[x], n = grid[y];
            if (m < 0 || n < 0) throw std::invalid_argument("superadditivity_check: negative grid level");
            if (m + n > mu.level()) continue;
            const double d = a[static_cast<std::size_t>(m)] + a[static_cast<std::size_t>(n)] -
                             a[static_cast<std::size_t>(m + n)];
            r.pairs.push_back({m, n, d});
            r.constant = std::max(r.constant, d);
        }
    }
    if (r.pairs.empty()) throw std::invalid_argument("superadditivity_check: no grid pair fits the resolution");
    r.passes = r.constant <= c_bound;
    return r;
}

std::pair<int, std::int64_t> half_interval_normalization(const DyadicMeasure1D& mu) {
    if (mu.empty()) throw std::invalid_argument("normalization of an empty measure");
    const int L = mu.level();
    const std::int64_t klo = mu.cells().front().k;
    const std::int64_t khi = mu.cells().back().k + 1;  // support inside [klo, khi) 2^-L
    const std::int64_t offset = -(klo >> L);            // integer k with klo/2^L + k in [0, 1)
    const std::int64_t right = khi + (offset << L);     // right end after translation, in cells
    int shift = 0;
    // Need right * 2^-L * 2^-shift <= 1/2.
    while ((right << 1) > (std::int64_t{1} << (L + shift))) ++shift;
    return {shift, offset};
}

StationaryPorosityReport stationary_porosity_check(const DyadicMeasure1D& mu, double epsilon, int m, int n,
                                                   std::optional<double> alpha) {
    if (m < 1 || n < 0) throw std::invalid_argument("stationary_porosity_check: bad scales");
    StationaryPorosityReport r;
    r.alpha = alpha ? *alpha : entropy_dim_estimate(mu, mu.level()).slope;
    std::tie(r.shift, r.offset) = half_interval_normalization(mu);
    const auto nm = rescale_dyadic(mu, r.shift, r.offset);
    if (n + m > nm.level()) throw std::invalid_argument("stationary_porosity_check: n + m exceeds resolution");
    const double total = nm.total_mass();
    double p = 0.0;
    for (int i = 0; i <= n; ++i) {
        for_each_component(nm, i, [&](const ComponentView& v) {
            const double hc = span_entropy(v.cells, nm.level() - (i + m), v.mass) / m;
            if (std::abs(hc - r.alpha) < epsilon) p += v.mass / total;
        });
    }
    p = std::clamp(p / (n + 1), 0.0, 1.0);
    r.verdict = {r.alpha, epsilon, m, 0, n, p, p > 1.0 - epsilon};
    return r;
}

}  // namespace msl
