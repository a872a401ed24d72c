#include "msl/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

#include "msl/entropy.hpp"
#include "msl/stationary.hpp"

namespace msl {

namespace {

std::vector<Run> merge_runs(std::vector<Run> runs) {
    std::sort(runs.begin(), runs.end());
    std::vector<Run> out;
    for (const auto& r : runs) {
        if (!out.empty() && r.first <= out.back().second) {
            out.back().second = std::max(out.back().second, r.second);
        } else {
            out.push_back(r);
        }
    }
    return out;
}

std::vector<Run> intersect_runs(const std::vector<Run>& a, const std::vector<Run>& b) {
    std::vector<Run> out;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const std::int64_t lo = std::max(a[i].first, b[j].first);
        const std::int64_t hi = std::min(a[i].second, b[j].second);
        if (lo < hi) out.emplace_back(lo, hi);
        (a[i].second < b[j].second) ? ++i : ++j;
    }
    return out;
}

// Level-n cells met by the image of [u, v) 2^-level under phi (open overlap).
Run image_run(const AffineMap& phi, double u, double v, int level, int n) {
    const double scale = std::ldexp(1.0, n - level);
    const double tt = std::ldexp(phi.t, n);
    double y0 = phi.a * u * scale + tt;
    double y1 = phi.a * v * scale + tt;
    if (y1 < y0) std::swap(y0, y1);
    const auto lo = static_cast<std::int64_t>(std::floor(y0));
    const auto hi = std::max(lo + 1, static_cast<std::int64_t>(std::ceil(y1)));
    return {lo, hi};
}

std::vector<Run> step_runs(const std::vector<AffineMap>& maps, const std::vector<Run>& y, int n) {
    std::vector<Run> out;
    out.reserve(y.size() * maps.size());
    for (const auto& phi : maps) {
        for (const auto& r : y) {
            out.push_back(image_run(phi, static_cast<double>(r.first), static_cast<double>(r.second), n, n));
        }
    }
    return merge_runs(std::move(out));
}

}  // namespace

bool CellSet::contains(std::int64_t k) const { return std::binary_search(cells.begin(), cells.end(), k); }

CellSet coarsen(const CellSet& x, int level) {
    if (level < 0 || level > x.level) throw std::invalid_argument("coarsen: level outside 0..resolution");
    CellSet out{level, {}};
    const int shift = x.level - level;
    for (auto k : x.cells) {
        const std::int64_t p = k >> shift;
        if (out.cells.empty() || out.cells.back() != p) out.cells.push_back(p);
    }
    return out;
}

bool is_subset(const CellSet& a, const CellSet& b) {
    if (a.level != b.level) throw std::invalid_argument("is_subset: level mismatch");
    return std::includes(b.cells.begin(), b.cells.end(), a.cells.begin(), a.cells.end());
}

std::vector<Run> to_runs(const CellSet& x) {
    std::vector<Run> out;
    for (auto k : x.cells) {
        if (!out.empty() && out.back().second == k) {
            ++out.back().second;
        } else {
            out.emplace_back(k, k + 1);
        }
    }
    return out;
}

CellSet from_runs(int level, const std::vector<Run>& runs) {
    CellSet out{level, {}};
    for (const auto& r : runs) {
        for (std::int64_t k = r.first; k < r.second; ++k) out.cells.push_back(k);
    }
    return out;
}

std::vector<AffineMap> FamilySpec::expand() const {
    std::vector<AffineMap> out = maps;
    if (box) {
        const auto& b = *box;
        if (!(b.r0 > 0.0) || !(b.r0 <= b.r1) || !(b.r1 < 1.0)) {
            throw std::invalid_argument("family box: need 0 < r0 <= r1 < 1");
        }
        if (!(b.t0 <= b.t1)) throw std::invalid_argument("family box: empty translation range");
        if (b.g < 0 || b.g > 16) throw std::invalid_argument("family box: grid exponent outside 0..16");
        const double h = std::ldexp(1.0, -b.g);
        // Grid points j * 2^-g inside the box; an empty slice falls back to the lower corner.
        auto grid = [h](double lo, double hi) {
            std::vector<double> v;
            for (auto j = static_cast<std::int64_t>(std::ceil(lo / h)); j * h <= hi; ++j) v.push_back(j * h);
            if (v.empty()) v.push_back(lo);
            return v;
        };
        for (double r : grid(b.r0, b.r1)) {
            for (double t : grid(b.t0, b.t1)) out.push_back({r, t});
        }
    }
    return out;
}

CellSet attractor_cells(const FamilySpec& family, int n) {
    const auto maps = family.expand();
    if (maps.empty()) throw std::invalid_argument("attractor_cells: empty family");
    if (n < 0 || n > 40) throw std::invalid_argument("attractor_cells: level out of range");
    const auto [lo, hi] = attractor_hull(maps);
    const auto a = static_cast<std::int64_t>(std::floor(std::ldexp(lo, n)));
    const auto b = std::max(a + 1, static_cast<std::int64_t>(std::ceil(std::ldexp(hi, n))));
    std::vector<Run> y{{a, b}};
    for (;;) {
        auto next = intersect_runs(step_runs(maps, y, n), y);
        if (next.empty()) throw std::runtime_error("attractor_cells: iteration emptied the cell set");
        if (next == y) break;
        y = std::move(next);
    }
    return from_runs(n, y);
}

CellSet hutchinson_cells(const std::vector<AffineMap>& maps, const CellSet& y) {
    return from_runs(y.level, step_runs(maps, to_runs(y), y.level));
}

std::vector<CellSet> coarsening_ladder(const CellSet& x, int lo) {
    std::vector<CellSet> out;
    for (int l = lo; l <= x.level; ++l) out.push_back(coarsen(x, l));
    return out;
}

double box_dim_estimate(const std::vector<CellSet>& sets) {
    if (sets.size() < 4) throw std::invalid_argument("box_dim_estimate: need at least 4 levels");
    std::vector<double> xs, ys;
    bool constant = true;
    for (const auto& s : sets) {
        if (s.cells.empty()) throw std::invalid_argument("box_dim_estimate: empty cell set");
        xs.push_back(s.level);
        ys.push_back(std::log2(static_cast<double>(s.cells.size())));
        constant = constant && s.cells.size() == sets.front().cells.size();
    }
    if (constant) return 0.0;
    return ls_slope(xs, ys);
}

std::string box_dim_csv(const std::vector<CellSet>& sets) {
    std::string s = "level,count,log2count\n";
    char buf[96];
    for (const auto& c : sets) {
        std::snprintf(buf, sizeof buf, "%d,%zu,%.12f\n", c.level, c.cells.size(),
                      std::log2(static_cast<double>(c.cells.size())));
        s += buf;
    }
    return s;
}

double similarity_dimension(const std::vector<double>& ratios) {
    if (ratios.empty()) throw std::invalid_argument("similarity_dimension: empty list");
    for (double r : ratios) {
        if (!(r > 0.0) || !(r < 1.0)) throw std::invalid_argument("similarity_dimension: ratio outside (0,1)");
    }
    auto f = [&](double s) {
        double v = 0.0;
        for (double r : ratios) v += std::pow(r, s);
        return v - 1.0;
    };
    double lo = 0.0, hi = 64.0;
    if (f(lo) <= 0.0) return 0.0;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    return std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
}

std::vector<double> default_c_grid() {
    std::vector<double> g;
    for (int j = 1; j <= 99; ++j) g.push_back(j / 100.0);
    return g;
}

PorosityScan porosity_constant(const CellSet& x, const std::vector<double>& c_grid) {
    if (x.cells.empty()) throw std::invalid_argument("porosity_constant: empty set");
    const int n = x.level;
    PorosityScan scan;
    scan.level_ratio.assign(static_cast<std::size_t>(n) + 1, 1.0);
    for (int l = 0; l <= n; ++l) {
        const int shift = n - l;
        const std::int64_t width = std::int64_t{1} << shift;
        double worst = 1.0;
        std::size_t b = 0;
        while (b < x.cells.size()) {
            const std::int64_t w = x.cells[b] >> shift;
            std::int64_t prev = (w << shift) - 1;  // last occupied fine cell so far
            std::int64_t gap = 0;
            while (b < x.cells.size() && (x.cells[b] >> shift) == w) {
                gap = std::max(gap, x.cells[b] - prev - 1);
                prev = x.cells[b++];
            }
            gap = std::max(gap, ((w + 1) << shift) - prev - 1);
            worst = std::min(worst, static_cast<double>(gap) / static_cast<double>(width));
        }
        scan.level_ratio[static_cast<std::size_t>(l)] = worst;
    }
    std::vector<double> grid = c_grid;
    std::sort(grid.rbegin(), grid.rend());
    for (double c : grid) {
        if (!(c > 0.0) || !(c < 1.0)) continue;
        const int top = n - static_cast<int>(std::ceil(std::log2(1.0 / c))) - 1;
        if (top < 0) continue;
        bool ok = true;
        for (int l = 0; l <= top && ok; ++l) ok = scan.level_ratio[static_cast<std::size_t>(l)] >= c;
        if (ok) {
            scan.c = c;
            break;
        }
    }
    return scan;
}

CellSet symmetric_cantor_cells(int level) {
    FamilySpec k;
    k.maps = {{1.0 / 3.0, -1.0 / 3.0}, {1.0 / 3.0, 1.0 / 3.0}};
    return attractor_cells(k, level);
}

CellSet cantor_copies_union(const CellSet& centers, const std::function<double(double)>& ratio_rule, int k_level) {
    if (centers.cells.empty()) throw std::invalid_argument("cantor_copies_union: no centers");
    const int n = centers.level;
    const auto k_runs = to_runs(symmetric_cantor_cells(k_level));
    std::vector<Run> out;
    for (auto c : centers.cells) {
        const double x = std::ldexp(static_cast<double>(c) + 0.5, -n);
        const double r = ratio_rule(x);
        if (!(r > 0.0) || !(r <= 1.0)) throw std::invalid_argument("cantor_copies_union: ratio outside (0,1]");
        const AffineMap phi{r, x};
        for (const auto& run : k_runs) {
            out.push_back(image_run(phi, static_cast<double>(run.first), static_cast<double>(run.second), k_level, n));
        }
    }
    return from_runs(n, merge_runs(std::move(out)));
}

std::string to_json(const CellSet& x) {
    std::string s = "{\"level\":" + std::to_string(x.level) + ",\"cells\":[";
    for (std::size_t j = 0; j < x.cells.size(); ++j) {
        if (j) s += ',';
        s += std::to_string(x.cells[j]);
    }
    return s + "]}";
}

CellSet cellset_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    CellSet x{j.at("level").get<int>(), j.at("cells").get<std::vector<std::int64_t>>()};
    std::sort(x.cells.begin(), x.cells.end());
    x.cells.erase(std::unique(x.cells.begin(), x.cells.end()), x.cells.end());
    return x;
}

}  // namespace msl
