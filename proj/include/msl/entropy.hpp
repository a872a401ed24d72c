#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msl/measure.hpp"

namespace msl {

struct EntropyReport {
    double value_bits = 0.0;
    int level = 0;
    std::optional<int> conditioning_level;
};

// -sum p log2 p over the probability vector obtained by dividing by total.
double shannon_bits(std::span<const double> weights);

// Entropy of the cells in `cells` grouped by k >> shift, normalized by `total`.
double span_entropy(std::span<const Cell> cells, int shift, double total);

EntropyReport entropy(const DyadicMeasure1D& mu, int m);
EntropyReport entropy(const DyadicMeasureG& nu, int m);

// H(mu, D_m | D_n) = sum over level-n cells F of mu(F) H(mu_F, D_m).
EntropyReport conditional_entropy(const DyadicMeasure1D& mu, int m, int n);

// A partition of the cells of a measure, described by a label for each cell index.
using CellLabeler = std::function<std::int64_t(std::int64_t)>;

CellLabeler dyadic_labeler(int resolution, int m);
// Level-m dyadic partition translated by `offset` cells of the resolution grid.
CellLabeler shifted_dyadic_labeler(int resolution, int m, std::int64_t offset);

double partition_entropy(const DyadicMeasure1D& mu, const CellLabeler& e);
// Entropy of the common refinement E v F.
double joint_entropy(const DyadicMeasure1D& mu, const CellLabeler& e, const CellLabeler& f);
// sum over atoms A of F of mu(A) H(mu_A, E), computed atom by atom.
double conditional_partition_entropy(const DyadicMeasure1D& mu, const CellLabeler& e, const CellLabeler& f);

struct MultiscaleReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double gap = 0.0;
};

// Average over i in [lo, hi] of sum_I mu(I) H(mu_I, D_{i+m}) / m.
double mean_component_entropy(const DyadicMeasure1D& mu, int m, int lo, int hi);

MultiscaleReport multiscale_check(const DyadicMeasure1D& mu, int m, int n);

struct PorosityVerdict {
    double h = 0.0;
    double delta = 0.0;
    int m = 0;
    int n1 = 0;
    int n2 = 0;
    double p = 0.0;
    bool passes = false;
};

PorosityVerdict entropy_porosity_test(const DyadicMeasure1D& mu, double h, double delta, int m, int n1, int n2);

// Largest (1/m) H(mu_{x,i}, D_{i+m}) over all components with n1 <= i <= n2.
double max_component_entropy(const DyadicMeasure1D& mu, int m, int n1, int n2);

// Mass (under i uniform on 0..n, I ~ mu) of the components mu_I that are not
// (h, delta, m)-entropy porous on the scales i..i+k.
double component_porosity_failure(const DyadicMeasure1D& mu, double h, double delta, int m, int n, int k);

struct EdimRow {
    int n;
    double h_bits;
    double h_over_n;
};

struct EdimReport {
    std::vector<EdimRow> table;
    double slope = 0.0;  // least-squares slope of H against n over the upper half of levels
    double upper = 0.0;  // max of H/n over the last ceil(n_max/4) levels
    double lower = 0.0;  // min of H/n over the same levels
};

EdimReport edim_from_entropies(const std::vector<EdimRow>& table);
EdimReport entropy_dim_estimate(const DyadicMeasure1D& mu, int n_max);
EdimReport entropy_dim_estimate(const std::function<DyadicMeasure1D(int)>& generator, int n_max);

std::string edim_csv(const EdimReport& r);

double local_dimension(const DyadicMeasure1D& mu, double x, int n);

// n_i = floor(i^(1+tau)).
std::int64_t entropy_average_scale(int i, double tau);
double pointwise_dim_estimate(const DyadicMeasure1D& mu, double x, double tau, int K);

// Least-squares slope of y against x.
double ls_slope(std::span<const double> x, std::span<const double> y);

}  // namespace msl
