#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace msl {

// Largest supported dyadic level (memory budget).
inline constexpr int kMaxLevelR = 26;
inline constexpr int kMaxLevelG = 20;

inline constexpr double kNormTolerance = 1e-9;
inline constexpr double kDropBelow = 1e-15;

struct Cell {
    std::int64_t k;
    double mass;
};

struct CellG {
    std::int64_t k1;  // log-scale coordinate s
    std::int64_t k2;  // translation coordinate t
    double mass;
};

struct CellGR {
    std::int64_t k1;
    std::int64_t k2;
    std::int64_t k3;
    double mass;
};

// Similarity x -> a*x + t. The norm is |a|.
struct AffineMap {
    double a = 1.0;
    double t = 0.0;

    double operator()(double x) const { return a * x + t; }
    double norm() const { return a < 0 ? -a : a; }
    bool contracting() const { return norm() < 1.0; }
    AffineMap inverse() const;
    friend bool operator==(const AffineMap&, const AffineMap&) = default;
};

// f∘g
AffineMap compose(const AffineMap& f, const AffineMap& g);

// Group coordinates: log-scale (s,t) means x -> e^s x + t; linear-scale (a,t) means x -> a x + t.
AffineMap from_log_params(double s, double t);
std::pair<double, double> to_log_params(const AffineMap& phi);

// Sparse histogram over the level-n dyadic cells [k/2^n,(k+1)/2^n), sorted by k.
class DyadicMeasure1D {
public:
    DyadicMeasure1D() = default;

    // Sorts, merges duplicates, drops non-positive masses. With normalize=true the
    // total is rescaled to 1 and masses below kDropBelow are removed.
    static DyadicMeasure1D from_cells(int level, std::vector<Cell> cells, bool normalize = true);

    // Trusts that cells are sorted by k, unique and positive.
    static DyadicMeasure1D from_sorted(int level, std::vector<Cell> cells);

    static DyadicMeasure1D dirac(int level, std::int64_t k);
    // Uniform on cells lo..hi-1.
    static DyadicMeasure1D uniform(int level, std::int64_t lo, std::int64_t hi);
    static DyadicMeasure1D uniform_unit(int level) { return uniform(level, 0, std::int64_t{1} << level); }

    int level() const { return level_; }
    const std::vector<Cell>& cells() const { return cells_; }
    std::size_t size() const { return cells_.size(); }
    bool empty() const { return cells_.empty(); }

    double total_mass() const;
    double mass_of(std::int64_t k) const;
    // Cells of this measure inside the level-i cell with index p.
    std::span<const Cell> cells_in(int i, std::int64_t p) const;
    double cell_mass(int i, std::int64_t p) const;
    std::int64_t index_of(double x) const;
    double midpoint(std::int64_t k) const;
    double cell_width() const;

    friend bool operator==(const DyadicMeasure1D& a, const DyadicMeasure1D& b);

private:
    int level_ = 0;
    std::vector<Cell> cells_;
};

// Sparse histogram over 2-D dyadic cells of G in log-scale coordinates (s,t).
class DyadicMeasureG {
public:
    DyadicMeasureG() = default;

    static DyadicMeasureG from_cells(int level, std::vector<CellG> cells, bool normalize = true);
    static DyadicMeasureG dirac(int level, std::int64_t k1, std::int64_t k2);

    int level() const { return level_; }
    const std::vector<CellG>& cells() const { return cells_; }
    std::size_t size() const { return cells_.size(); }

    double total_mass() const;
    // The map represented by the midpoint of a cell.
    AffineMap midpoint_map(const CellG& c) const;

    friend bool operator==(const DyadicMeasureG& a, const DyadicMeasureG& b);

private:
    int level_ = 0;
    std::vector<CellG> cells_;
};

struct ProductMeasure {
    int level = 0;
    std::vector<CellGR> cells;

    double total_mass() const;
    DyadicMeasureG marginal_g() const;
    DyadicMeasure1D marginal_r() const;
};

struct IndexRange {
    std::int64_t lo;  // inclusive
    std::int64_t hi;  // exclusive
};

DyadicMeasure1D condition(const DyadicMeasure1D& mu, IndexRange window);
DyadicMeasure1D condition(const DyadicMeasure1D& mu, std::span<const std::int64_t> window);

// mu conditioned on the level-i cell containing the level-n cell k.
DyadicMeasure1D component(const DyadicMeasure1D& mu, std::int64_t k, int i);
DyadicMeasureG component(const DyadicMeasureG& nu, std::int64_t k1, std::int64_t k2, int i);

struct ComponentSample {
    DyadicMeasure1D component;
    int base_level;
    std::int64_t cell;  // index of the conditioning cell at base_level
    double weight;
};

// i uniform in {lo..hi}, then a level-i cell I with probability mu(I).
std::vector<ComponentSample> component_distribution(const DyadicMeasure1D& mu, int lo, int hi);
inline std::vector<ComponentSample> component_distribution(const DyadicMeasure1D& mu, int n) {
    return component_distribution(mu, 0, n);
}

// Lightweight view of a component: no copy of the cells.
struct ComponentView {
    int base_level;
    std::int64_t cell;
    double mass;  // mu(I)
    std::span<const Cell> cells;
};

template <class F>
void for_each_component(const DyadicMeasure1D& mu, int i, F&& f);

DyadicMeasure1D pushforward_affine(const DyadicMeasure1D& mu, const AffineMap& phi);
// Output level for pushforward_affine.
int pushforward_level(int level, const AffineMap& phi);

ProductMeasure product(const DyadicMeasureG& nu, const DyadicMeasure1D& mu);

DyadicMeasure1D coarsen(const DyadicMeasure1D& mu, int m);
DyadicMeasureG coarsen(const DyadicMeasureG& nu, int m);
// Coarsen to an absolute level.
DyadicMeasure1D coarsen_to(const DyadicMeasure1D& mu, int level);
DyadicMeasureG coarsen_to(const DyadicMeasureG& nu, int level);

// sum_j w_j mu_j for measures at a common level.
DyadicMeasure1D mixture(std::span<const std::pair<double, DyadicMeasure1D>> parts);

double total_variation(const DyadicMeasure1D& a, const DyadicMeasure1D& b);

// Relabel cells so the measure lives at a finer level without changing the partition
// geometry: x -> 2^-shift (x + k_offset).
DyadicMeasure1D rescale_dyadic(const DyadicMeasure1D& mu, int shift, std::int64_t k_offset);

// Measure JSON: {"space":"R"|"G","level":n,"cells":[[k,mass],...]}.
std::string to_json(const DyadicMeasure1D& mu);
std::string to_json(const DyadicMeasureG& nu);
DyadicMeasure1D measure_from_json(const std::string& text);
DyadicMeasureG measure_g_from_json(const std::string& text);

// ---- template implementation ----

template <class F>
void for_each_component(const DyadicMeasure1D& mu, int i, F&& f) {
    const auto& cs = mu.cells();
    const int shift = mu.level() - i;
    std::size_t b = 0;
    while (b < cs.size()) {
        const std::int64_t p = cs[b].k >> shift;
        std::size_t e = b;
        double m = 0.0;
        while (e < cs.size() && (cs[e].k >> shift) == p) {
            m += cs[e].mass;
            ++e;
        }
        f(ComponentView{i, p, m, std::span<const Cell>(cs.data() + b, e - b)});
        b = e;
    }
}

}  // namespace msl
