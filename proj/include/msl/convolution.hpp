#pragma once

#include <string>
#include <vector>

#include "msl/entropy.hpp"
#include "msl/measure.hpp"

namespace msl {

// Base point (phi, x) with phi = (s, t) in log-scale coordinates.
struct ActionBase {
    double s = 0.0;
    double t = 0.0;
    double x = 0.0;
};

// Partial derivatives of f(phi, x) = e^s x + t: A = (df/ds, df/dt), B = df/dx.
struct ActionDerivative {
    double a_s = 0.0;
    double a_t = 1.0;
    double b = 1.0;
    ActionBase base;
};

DyadicMeasure1D convolve_R(const DyadicMeasure1D& nu, const DyadicMeasure1D& mu);

// Push nu x mu through (phi, x) -> phi(x), cell midpoints, output at the common level.
DyadicMeasure1D act_convolve(const DyadicMeasureG& nu, const DyadicMeasure1D& mu);

ActionDerivative derivative(const ActionBase& base);

// First-order image f(phi,x) + A(phi'-phi) + B(x'-x) of nu' x mu'.
DyadicMeasure1D first_order_image(const DyadicMeasureG& nu, const DyadicMeasure1D& mu, const ActionBase& base);

// (B^-1 A) nu' * mu', with B^-1 A applied to phi' - phi.
DyadicMeasure1D linearized_convolve(const DyadicMeasureG& nu, const DyadicMeasure1D& mu, const ActionBase& base);

// |H(nu'.mu', D_{i+m}) - H(A nu' * B mu', D_{i+m})| for level-i components; requires m <= i.
double linearization_gap(const DyadicMeasureG& nu, const DyadicMeasure1D& mu, const ActionBase& base, int i, int m);

// g(s, t) = alpha s + beta t.
struct LinearFunctional {
    double alpha = 0.0;
    double beta = 0.0;
};

DyadicMeasure1D pushforward_linear(const DyadicMeasureG& theta, const LinearFunctional& g, int level);

struct SeparationVerdict {
    double h_g1 = 0.0;
    double h_g2 = 0.0;
    double h_theta = 0.0;
    double c = 1.0;  // bi-Lipschitz constant of (g1, g2)
    double bound = 0.0;
    bool holds = false;
};

SeparationVerdict separation_entropy_bound(const DyadicMeasureG& theta, const LinearFunctional& g1,
                                           const LinearFunctional& g2, int level);

struct GrowthRow {
    int n;
    double h_mu_over_n;
    double h_conv_over_n;
    double gap;
};

struct GrowthParams {
    double epsilon = 0.1;  // porosity 1 - epsilon, grid dimension threshold epsilon
    double delta = 0.1;
    int m = 4;
};

struct GrowthReport {
    std::vector<GrowthRow> rows;
    double min_tail_gap = 0.0;  // minimum gap over the upper half of the rows
    PorosityVerdict porosity;
    double nu_scale_entropy = 0.0;  // (1/n) H(nu, D_n^G) at the top level
    std::vector<std::string> warnings;
};

GrowthReport entropy_growth_experiment(const DyadicMeasureG& nu, const DyadicMeasure1D& mu, int n_lo, int n_hi,
                                       const GrowthParams& params = {});

std::string growth_csv(const GrowthReport& r);

}  // namespace msl
