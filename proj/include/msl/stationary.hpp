#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "msl/entropy.hpp"
#include "msl/measure.hpp"
#include "msl/random.hpp"

namespace msl {

struct WeightedIFS {
    std::vector<AffineMap> maps;
    std::vector<double> p;

    // Throws unless p is a probability vector and every map is a proper contraction.
    void validate() const;
    double r0() const;
    double r1() const;
};

// Smallest interval [lo, hi] mapped into itself by every map; the convex hull of the attractor.
std::pair<double, double> attractor_hull(const std::vector<AffineMap>& maps);

class MapSampler {
public:
    virtual ~MapSampler() = default;
    virtual AffineMap draw(Rng& rng) const = 0;
    // Declared support: r0 <= |a| <= r1 and t in [t_lo, t_hi].
    virtual double r0() const = 0;
    virtual double r1() const = 0;
    virtual double t_lo() const = 0;
    virtual double t_hi() const = 0;
    virtual std::string describe() const = 0;
};

class FiniteSampler : public MapSampler {
public:
    explicit FiniteSampler(WeightedIFS ifs);
    AffineMap draw(Rng& rng) const override;
    double r0() const override { return ifs_.r0(); }
    double r1() const override { return ifs_.r1(); }
    double t_lo() const override { return t_lo_; }
    double t_hi() const override { return t_hi_; }
    std::string describe() const override;
    const WeightedIFS& ifs() const { return ifs_; }

private:
    WeightedIFS ifs_;
    std::vector<double> cumulative_;
    double t_lo_ = 0.0;
    double t_hi_ = 0.0;
};

// Ratio uniform on [r0, r1], translation uniform on [t0, t1].
class BoxSampler : public MapSampler {
public:
    BoxSampler(double r0, double r1, double t0, double t1);
    AffineMap draw(Rng& rng) const override;
    double r0() const override { return r0_; }
    double r1() const override { return r1_; }
    double t_lo() const override { return t0_; }
    double t_hi() const override { return t1_; }
    std::string describe() const override;

private:
    double r0_, r1_, t0_, t1_;
};

// Ratio uniform on [r0, r1]; translation 0 or 1 - ratio with equal probability,
// so [0, 1] is mapped onto one of its ends.
class EndpointSampler : public MapSampler {
public:
    EndpointSampler(double r0, double r1);
    AffineMap draw(Rng& rng) const override;
    double r0() const override { return r0_; }
    double r1() const override { return r1_; }
    double t_lo() const override { return 0.0; }
    double t_hi() const override { return 1.0 - r0_; }
    std::string describe() const override;

private:
    double r0_, r1_;
};

// {"kind":"finite","maps":[[a,t],...],"p":[...]}, {"kind":"box","ratio_range":[r0,r1],"t_range":[t0,t1]}
// or {"kind":"endpoints","ratio_range":[r0,r1]}.
std::unique_ptr<MapSampler> sampler_from_json(const std::string& text);

struct StoppingResult {
    AffineMap map;  // phi_1 ∘ ... ∘ phi_tau
    int tau = 0;
};

// Draws phi_1, phi_2, ... until the composition has norm <= 2^-n.
StoppingResult stopping_time_compose(const MapSampler& sampler, int n, Rng& rng);

// Stopping times never exceed ceil(n / log2(1/r1)).
int stopping_time_cap(int n, double r1);

DyadicMeasure1D self_similar_measure(const WeightedIFS& ifs, int n);

// Exact level-n discretization of the middle-third Cantor measure (Cantor function differences).
DyadicMeasure1D middle_third_cantor(int n);

struct StationaryOptions {
    std::uint64_t seed = 1;
    int workers = 1;
    double x0 = 0.5;
};

struct StationaryResult {
    DyadicMeasure1D measure;
    std::int64_t samples = 0;
    double max_standard_error = 0.0;  // max over cells of sqrt(p/N)
    int max_tau = 0;
    std::vector<std::string> warnings;
};

StationaryResult stationary_measure(const MapSampler& sampler, int n, std::int64_t samples,
                                    const StationaryOptions& opts = {});

struct SuperadditivityRow {
    int m;
    int n;
    double deficit;  // a_m + a_n - a_{m+n}
};

struct SuperadditivityReport {
    std::vector<std::pair<int, double>> a;  // (n, H(mu, D_n))
    std::vector<SuperadditivityRow> pairs;
    double constant = 0.0;  // smallest C >= 0 that works for every pair
    bool passes = false;
};

// Checks a_{m+n} >= a_m + a_n - C over grid pairs with m + n <= mu.level().
SuperadditivityReport superadditivity_check(const DyadicMeasure1D& mu, const std::vector<int>& grid,
                                            double c_bound = 4.0);

struct StationaryPorosityReport {
    PorosityVerdict verdict;  // h = alpha, delta = epsilon, p = concentration probability
    double alpha = 0.0;
    int shift = 0;           // N in x -> 2^-N (x + k)
    std::int64_t offset = 0;  // k
};

// Smallest N >= 0 and integer k with 2^-N (supp mu + k) inside [0, 1/2).
std::pair<int, std::int64_t> half_interval_normalization(const DyadicMeasure1D& mu);

StationaryPorosityReport stationary_porosity_check(const DyadicMeasure1D& mu, double epsilon, int m, int n,
                                                   std::optional<double> alpha = std::nullopt);

}  // namespace msl
