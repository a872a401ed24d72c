#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "msl/measure.hpp"

namespace msl {

struct CellSet {
    int level = 0;
    std::vector<std::int64_t> cells;  // sorted, unique

    std::size_t size() const { return cells.size(); }
    bool contains(std::int64_t k) const;
    friend bool operator==(const CellSet&, const CellSet&) = default;
};

CellSet coarsen(const CellSet& x, int level);
bool is_subset(const CellSet& a, const CellSet& b);

// Maximal runs [lo, hi) of consecutive cells.
using Run = std::pair<std::int64_t, std::int64_t>;
std::vector<Run> to_runs(const CellSet& x);
CellSet from_runs(int level, const std::vector<Run>& runs);

// Grid in (ratio, translation) space with step 2^-g in each coordinate.
struct ParameterBox {
    double r0 = 0.25;
    double r1 = 0.5;
    double t0 = 0.0;
    double t1 = 1.0;
    int g = 8;
};

struct FamilySpec {
    std::vector<AffineMap> maps;
    std::optional<ParameterBox> box;

    // The finite family: explicit maps plus the grid points of the box.
    std::vector<AffineMap> expand() const;
};

CellSet attractor_cells(const FamilySpec& family, int n);

// One Hutchinson step Y -> U phi(Y) on cells, without intersecting with Y.
CellSet hutchinson_cells(const std::vector<AffineMap>& maps, const CellSet& y);

// Sets at levels lo..x.level obtained by coarsening x.
std::vector<CellSet> coarsening_ladder(const CellSet& x, int lo);

double box_dim_estimate(const std::vector<CellSet>& sets);
std::string box_dim_csv(const std::vector<CellSet>& sets);

double similarity_dimension(const std::vector<double>& ratios);

struct PorosityScan {
    double c = 0.0;                    // largest passing grid value, 0 if none passes
    std::vector<double> level_ratio;  // per window level: worst gap length over window length
};

// c passes when every dyadic window I at level <= n_max - ceil(log2(1/c)) - 1 meeting X
// contains a run of empty fine cells of length >= c|I|.
PorosityScan porosity_constant(const CellSet& x, const std::vector<double>& c_grid);
std::vector<double> default_c_grid();

// Cells of the symmetric middle-third Cantor set K in [-1/2, 1/2].
CellSet symmetric_cantor_cells(int level);

// Y = union over centers c of C of r(c) K + c, at the level of C; K resolved at k_level.
CellSet cantor_copies_union(const CellSet& centers, const std::function<double(double)>& ratio_rule, int k_level);

std::string to_json(const CellSet& x);
CellSet cellset_from_json(const std::string& text);

}  // namespace msl
