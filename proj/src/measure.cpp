#include "msl/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace msl {

namespace {

void check_level(int level, int cap) {
    if (level < 0 || level > cap) {
        throw std::invalid_argument("level " + std::to_string(level) + " outside supported range 0.." +
                                    std::to_string(cap));
    }
}

template <class C, class Less, class Same>
std::vector<C> merge_sorted(std::vector<C> cells, Less less, Same same) {
    std::stable_sort(cells.begin(), cells.end(), less);
    std::vector<C> out;
    out.reserve(cells.size());
    for (const auto& c : cells) {
        if (!out.empty() && same(out.back(), c)) {
            out.back().mass += c.mass;
        } else {
            out.push_back(c);
        }
    }
    std::erase_if(out, [](const C& c) { return !(c.mass > 0.0); });
    return out;
}

template <class C>
void normalize_cells(std::vector<C>& cells) {
    double total = 0.0;
    for (const auto& c : cells) total += c.mass;
    if (!(total > 0.0)) throw std::invalid_argument("measure has zero total mass");
    for (auto& c : cells) c.mass /= total;
    std::erase_if(cells, [](const C& c) { return c.mass < kDropBelow; });
}

std::string format_mass(double m) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", m);
    return buf;
}

}  // namespace

AffineMap AffineMap::inverse() const {
    if (a == 0.0) throw std::invalid_argument("affine map with zero ratio");
    return {1.0 / a, -t / a};
}

AffineMap compose(const AffineMap& f, const AffineMap& g) { return {f.a * g.a, f.a * g.t + f.t}; }

AffineMap from_log_params(double s, double t) { return {std::exp(s), t}; }

std::pair<double, double> to_log_params(const AffineMap& phi) {
    if (!(phi.a > 0.0)) throw std::invalid_argument("log-scale coordinates need a positive ratio");
    return {std::log(phi.a), phi.t};
}

// ---------------------------------------------------------------- 1-D

DyadicMeasure1D DyadicMeasure1D::from_cells(int level, std::vector<Cell> cells, bool normalize) {
    check_level(level, kMaxLevelR);
    DyadicMeasure1D mu;
    mu.level_ = level;
    mu.cells_ = merge_sorted(
        std::move(cells), [](const Cell& a, const Cell& b) { return a.k < b.k; },
        [](const Cell& a, const Cell& b) { return a.k == b.k; });
    if (normalize) normalize_cells(mu.cells_);
    return mu;
}

DyadicMeasure1D DyadicMeasure1D::from_sorted(int level, std::vector<Cell> cells) {
    check_level(level, kMaxLevelR);
    DyadicMeasure1D mu;
    mu.level_ = level;
    mu.cells_ = std::move(cells);
    return mu;
}

DyadicMeasure1D DyadicMeasure1D::dirac(int level, std::int64_t k) { return from_sorted(level, {{k, 1.0}}); }

DyadicMeasure1D DyadicMeasure1D::uniform(int level, std::int64_t lo, std::int64_t hi) {
    if (hi <= lo) throw std::invalid_argument("uniform: empty index range");
    std::vector<Cell> cells;
    cells.reserve(static_cast<std::size_t>(hi - lo));
    const double m = 1.0 / static_cast<double>(hi - lo);
    for (std::int64_t k = lo; k < hi; ++k) cells.push_back({k, m});
    return from_sorted(level, std::move(cells));
}

double DyadicMeasure1D::total_mass() const {
    double s = 0.0;
    for (const auto& c : cells_) s += c.mass;
    return s;
}

double DyadicMeasure1D::mass_of(std::int64_t k) const {
    auto it = std::lower_bound(cells_.begin(), cells_.end(), k, [](const Cell& c, std::int64_t v) { return c.k < v; });
    return (it != cells_.end() && it->k == k) ? it->mass : 0.0;
}

std::span<const Cell> DyadicMeasure1D::cells_in(int i, std::int64_t p) const {
    if (i > level_) throw std::invalid_argument("cells_in: level above resolution");
    const int shift = level_ - i;
    const std::int64_t lo = p << shift;
    const std::int64_t hi = (p + 1) << shift;
    auto cmp = [](const Cell& c, std::int64_t v) { return c.k < v; };
    auto b = std::lower_bound(cells_.begin(), cells_.end(), lo, cmp);
    auto e = std::lower_bound(b, cells_.end(), hi, cmp);
    return {cells_.data() + (b - cells_.begin()), static_cast<std::size_t>(e - b)};
}

double DyadicMeasure1D::cell_mass(int i, std::int64_t p) const {
    double s = 0.0;
    for (const auto& c : cells_in(i, p)) s += c.mass;
    return s;
}

std::int64_t DyadicMeasure1D::index_of(double x) const {
    return static_cast<std::int64_t>(std::floor(std::ldexp(x, level_)));
}

double DyadicMeasure1D::midpoint(std::int64_t k) const {
    return std::ldexp(static_cast<double>(k) + 0.5, -level_);
}

double DyadicMeasure1D::cell_width() const { return std::ldexp(1.0, -level_); }

bool operator==(const DyadicMeasure1D& a, const DyadicMeasure1D& b) {
    if (a.level_ != b.level_ || a.cells_.size() != b.cells_.size()) return false;
    for (std::size_t j = 0; j < a.cells_.size(); ++j) {
        if (a.cells_[j].k != b.cells_[j].k || a.cells_[j].mass != b.cells_[j].mass) return false;
    }
    return true;
}

// ---------------------------------------------------------------- G

DyadicMeasureG DyadicMeasureG::from_cells(int level, std::vector<CellG> cells, bool normalize) {
    check_level(level, kMaxLevelG);
    DyadicMeasureG nu;
    nu.level_ = level;
    nu.cells_ = merge_sorted(
        std::move(cells),
        [](const CellG& a, const CellG& b) { return a.k1 != b.k1 ? a.k1 < b.k1 : a.k2 < b.k2; },
        [](const CellG& a, const CellG& b) { return a.k1 == b.k1 && a.k2 == b.k2; });
    if (normalize) normalize_cells(nu.cells_);
    return nu;
}

DyadicMeasureG DyadicMeasureG::dirac(int level, std::int64_t k1, std::int64_t k2) {
    return from_cells(level, {{k1, k2, 1.0}});
}

double DyadicMeasureG::total_mass() const {
    double s = 0.0;
    for (const auto& c : cells_) s += c.mass;
    return s;
}

AffineMap DyadicMeasureG::midpoint_map(const CellG& c) const {
    const double s = std::ldexp(static_cast<double>(c.k1) + 0.5, -level_);
    const double t = std::ldexp(static_cast<double>(c.k2) + 0.5, -level_);
    return from_log_params(s, t);
}

bool operator==(const DyadicMeasureG& a, const DyadicMeasureG& b) {
    if (a.level_ != b.level_ || a.cells_.size() != b.cells_.size()) return false;
    for (std::size_t j = 0; j < a.cells_.size(); ++j) {
        const auto& x = a.cells_[j];
        const auto& y = b.cells_[j];
        if (x.k1 != y.k1 || x.k2 != y.k2 || x.mass != y.mass) return false;
    }
    return true;
}

// ---------------------------------------------------------------- product

double ProductMeasure::total_mass() const {
    double s = 0.0;
    for (const auto& c : cells) s += c.mass;
    return s;
}

DyadicMeasureG ProductMeasure::marginal_g() const {
    std::vector<CellG> out;
    out.reserve(cells.size());
    for (const auto& c : cells) out.push_back({c.k1, c.k2, c.mass});
    return DyadicMeasureG::from_cells(level, std::move(out), false);
}

DyadicMeasure1D ProductMeasure::marginal_r() const {
    std::vector<Cell> out;
    out.reserve(cells.size());
    for (const auto& c : cells) out.push_back({c.k3, c.mass});
    return DyadicMeasure1D::from_cells(level, std::move(out), false);
}

ProductMeasure product(const DyadicMeasureG& nu, const DyadicMeasure1D& mu) {
    if (nu.level() != mu.level()) throw std::invalid_argument("product: level mismatch");
    ProductMeasure p;
    p.level = mu.level();
    p.cells.reserve(nu.size() * mu.size());
    for (const auto& g : nu.cells()) {
        for (const auto& c : mu.cells()) p.cells.push_back({g.k1, g.k2, c.k, g.mass * c.mass});
    }
    return p;
}

// ---------------------------------------------------------------- conditioning

DyadicMeasure1D condition(const DyadicMeasure1D& mu, IndexRange window) {
    std::vector<Cell> kept;
    for (const auto& c : mu.cells()) {
        if (c.k >= window.lo && c.k < window.hi) kept.push_back(c);
    }
    double m = 0.0;
    for (const auto& c : kept) m += c.mass;
    if (!(m > 0.0)) throw std::invalid_argument("empty condition");
    return DyadicMeasure1D::from_cells(mu.level(), std::move(kept), true);
}

DyadicMeasure1D condition(const DyadicMeasure1D& mu, std::span<const std::int64_t> window) {
    std::vector<std::int64_t> w(window.begin(), window.end());
    std::sort(w.begin(), w.end());
    std::vector<Cell> kept;
    for (const auto& c : mu.cells()) {
        if (std::binary_search(w.begin(), w.end(), c.k)) kept.push_back(c);
    }
    double m = 0.0;
    for (const auto& c : kept) m += c.mass;
    if (!(m > 0.0)) throw std::invalid_argument("empty condition");
    return DyadicMeasure1D::from_cells(mu.level(), std::move(kept), true);
}

DyadicMeasure1D component(const DyadicMeasure1D& mu, std::int64_t k, int i) {
    if (i < 0 || i > mu.level()) throw std::invalid_argument("component: level outside 0..resolution");
    const std::int64_t p = k >> (mu.level() - i);
    auto span = mu.cells_in(i, p);
    std::vector<Cell> cells(span.begin(), span.end());
    double m = 0.0;
    for (const auto& c : cells) m += c.mass;
    if (!(m > 0.0)) throw std::invalid_argument("component: zero-mass cell");
    return DyadicMeasure1D::from_cells(mu.level(), std::move(cells), true);
}

DyadicMeasureG component(const DyadicMeasureG& nu, std::int64_t k1, std::int64_t k2, int i) {
    if (i < 0 || i > nu.level()) throw std::invalid_argument("component: level outside 0..resolution");
    const int shift = nu.level() - i;
    const std::int64_t p1 = k1 >> shift;
    const std::int64_t p2 = k2 >> shift;
    std::vector<CellG> cells;
    for (const auto& c : nu.cells()) {
        if ((c.k1 >> shift) == p1 && (c.k2 >> shift) == p2) cells.push_back(c);
    }
    if (cells.empty()) throw std::invalid_argument("component: zero-mass cell");
    return DyadicMeasureG::from_cells(nu.level(), std::move(cells), true);
}

std::vector<ComponentSample> component_distribution(const DyadicMeasure1D& mu, int lo, int hi) {
    if (hi > mu.level()) throw std::invalid_argument("component_distribution: n exceeds resolution");
    if (lo < 0 || lo > hi) throw std::invalid_argument("component_distribution: bad level range");
    const double levels = static_cast<double>(hi - lo + 1);
    std::vector<ComponentSample> out;
    for (int i = lo; i <= hi; ++i) {
        for_each_component(mu, i, [&](const ComponentView& v) {
            std::vector<Cell> cells(v.cells.begin(), v.cells.end());
            out.push_back({DyadicMeasure1D::from_cells(mu.level(), std::move(cells), true), i, v.cell,
                           v.mass / levels});
        });
    }
    return out;
}

// ---------------------------------------------------------------- push-forward, coarsening

int pushforward_level(int level, const AffineMap& phi) {
    if (phi.a == 0.0) throw std::invalid_argument("pushforward: zero ratio");
    const double l = std::log2(phi.norm());
    double r = std::round(l);
    if (std::abs(l - std::trunc(l)) == 0.5) r = std::trunc(l);
    return level - static_cast<int>(r);
}

DyadicMeasure1D pushforward_affine(const DyadicMeasure1D& mu, const AffineMap& phi) {
    const int out_level = pushforward_level(mu.level(), phi);
    check_level(out_level, kMaxLevelR);
    std::vector<Cell> cells;
    cells.reserve(mu.size());
    for (const auto& c : mu.cells()) {
        const double y = phi(mu.midpoint(c.k));
        cells.push_back({static_cast<std::int64_t>(std::floor(std::ldexp(y, out_level))), c.mass});
    }
    return DyadicMeasure1D::from_cells(out_level, std::move(cells), false);
}

DyadicMeasure1D coarsen(const DyadicMeasure1D& mu, int m) {
    if (m < 0 || m > mu.level()) throw std::invalid_argument("coarsen: m outside 0..level");
    if (m == 0) return mu;
    std::vector<Cell> out;
    out.reserve(mu.size());
    for (const auto& c : mu.cells()) {
        const std::int64_t p = c.k >> m;
        if (!out.empty() && out.back().k == p) {
            out.back().mass += c.mass;
        } else {
            out.push_back({p, c.mass});
        }
    }
    return DyadicMeasure1D::from_sorted(mu.level() - m, std::move(out));
}

DyadicMeasureG coarsen(const DyadicMeasureG& nu, int m) {
    if (m < 0 || m > nu.level()) throw std::invalid_argument("coarsen: m outside 0..level");
    if (m == 0) return nu;
    std::vector<CellG> out;
    out.reserve(nu.size());
    for (const auto& c : nu.cells()) out.push_back({c.k1 >> m, c.k2 >> m, c.mass});
    return DyadicMeasureG::from_cells(nu.level() - m, std::move(out), false);
}

DyadicMeasure1D coarsen_to(const DyadicMeasure1D& mu, int level) { return coarsen(mu, mu.level() - level); }
DyadicMeasureG coarsen_to(const DyadicMeasureG& nu, int level) { return coarsen(nu, nu.level() - level); }

DyadicMeasure1D mixture(std::span<const std::pair<double, DyadicMeasure1D>> parts) {
    if (parts.empty()) throw std::invalid_argument("mixture: no parts");
    const int level = parts.front().second.level();
    std::vector<Cell> cells;
    for (const auto& [w, mu] : parts) {
        if (mu.level() != level) throw std::invalid_argument("mixture: level mismatch");
        for (const auto& c : mu.cells()) cells.push_back({c.k, w * c.mass});
    }
    return DyadicMeasure1D::from_cells(level, std::move(cells), false);
}

double total_variation(const DyadicMeasure1D& a, const DyadicMeasure1D& b) {
    if (a.level() != b.level()) throw std::invalid_argument("total_variation: level mismatch");
    const auto& x = a.cells();
    const auto& y = b.cells();
    std::size_t i = 0, j = 0;
    double s = 0.0;
    while (i < x.size() || j < y.size()) {
        if (j == y.size() || (i < x.size() && x[i].k < y[j].k)) {
            s += x[i++].mass;
        } else if (i == x.size() || y[j].k < x[i].k) {
            s += y[j++].mass;
        } else {
            s += std::abs(x[i++].mass - y[j++].mass);
        }
    }
    return 0.5 * s;
}

DyadicMeasure1D rescale_dyadic(const DyadicMeasure1D& mu, int shift, std::int64_t k_offset) {
    if (shift < 0) throw std::invalid_argument("rescale_dyadic: negative shift");
    std::vector<Cell> out(mu.cells());
    const std::int64_t off = k_offset << mu.level();
    for (auto& c : out) c.k += off;
    return DyadicMeasure1D::from_sorted(mu.level() + shift, std::move(out));
}

// ---------------------------------------------------------------- JSON

std::string to_json(const DyadicMeasure1D& mu) {
    std::string s = "{\"space\":\"R\",\"level\":" + std::to_string(mu.level()) + ",\"cells\":[";
    bool first = true;
    for (const auto& c : mu.cells()) {
        if (!first) s += ',';
        first = false;
        s += '[' + std::to_string(c.k) + ',' + format_mass(c.mass) + ']';
    }
    return s + "]}";
}

std::string to_json(const DyadicMeasureG& nu) {
    std::string s = "{\"space\":\"G\",\"level\":" + std::to_string(nu.level()) + ",\"cells\":[";
    bool first = true;
    for (const auto& c : nu.cells()) {
        if (!first) s += ',';
        first = false;
        s += '[' + std::to_string(c.k1) + ',' + std::to_string(c.k2) + ',' + format_mass(c.mass) + ']';
    }
    return s + "]}";
}

DyadicMeasure1D measure_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    if (j.at("space").get<std::string>() != "R") throw std::invalid_argument("expected a measure on R");
    std::vector<Cell> cells;
    for (const auto& c : j.at("cells")) cells.push_back({c.at(0).get<std::int64_t>(), c.at(1).get<double>()});
    auto mu = DyadicMeasure1D::from_cells(j.at("level").get<int>(), std::move(cells), false);
    if (std::abs(mu.total_mass() - 1.0) > kNormTolerance) throw std::invalid_argument("measure is not normalized");
    return mu;
}

DyadicMeasureG measure_g_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    if (j.at("space").get<std::string>() != "G") throw std::invalid_argument("expected a measure on G");
    std::vector<CellG> cells;
    for (const auto& c : j.at("cells")) {
        cells.push_back({c.at(0).get<std::int64_t>(), c.at(1).get<std::int64_t>(), c.at(2).get<double>()});
    }
    auto nu = DyadicMeasureG::from_cells(j.at("level").get<int>(), std::move(cells), false);
    if (std::abs(nu.total_mass() - 1.0) > kNormTolerance) throw std::invalid_argument("measure is not normalized");
    return nu;
}

}  // namespace msl
