#include "msl/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>

namespace msl {

namespace {

void require_level(const DyadicMeasure1D& mu, int m) {
    if (m < 0 || m > mu.level()) {
        throw std::invalid_argument("entropy: level " + std::to_string(m) + " exceeds resolution " +
                                    std::to_string(mu.level()));
    }
}

double plogp(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

}  // namespace

double shannon_bits(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) return 0.0;
    double h = 0.0;
    for (double w : weights) h += plogp(w / total);
    return h;
}

double span_entropy(std::span<const Cell> cells, int shift, double total) {
    double h = 0.0;
    std::size_t b = 0;
    while (b < cells.size()) {
        const std::int64_t p = cells[b].k >> shift;
        double g = 0.0;
        while (b < cells.size() && (cells[b].k >> shift) == p) g += cells[b++].mass;
        h += plogp(g / total);
    }
    return h;
}

EntropyReport entropy(const DyadicMeasure1D& mu, int m) {
    require_level(mu, m);
    return {span_entropy(mu.cells(), mu.level() - m, mu.total_mass()), m, std::nullopt};
}

EntropyReport entropy(const DyadicMeasureG& nu, int m) {
    if (m < 0 || m > nu.level()) throw std::invalid_argument("entropy: level exceeds resolution");
    const auto c = coarsen_to(nu, m);
    const double total = c.total_mass();
    double h = 0.0;
    for (const auto& cell : c.cells()) h += plogp(cell.mass / total);
    return {h, m, std::nullopt};
}

EntropyReport conditional_entropy(const DyadicMeasure1D& mu, int m, int n) {
    require_level(mu, m);
    if (n > m) throw std::invalid_argument("conditional_entropy: coarse level above fine level");
    if (n < 0) throw std::invalid_argument("conditional_entropy: negative level");
    const double total = mu.total_mass();
    double h = 0.0;
    for_each_component(mu, n, [&](const ComponentView& v) {
        h += (v.mass / total) * span_entropy(v.cells, mu.level() - m, v.mass);
    });
    return {h, m, n};
}

CellLabeler dyadic_labeler(int resolution, int m) {
    const int shift = resolution - m;
    return [shift](std::int64_t k) { return k >> shift; };
}

CellLabeler shifted_dyadic_labeler(int resolution, int m, std::int64_t offset) {
    const int shift = resolution - m;
    return [shift, offset](std::int64_t k) { return (k + offset) >> shift; };
}

double partition_entropy(const DyadicMeasure1D& mu, const CellLabeler& e) {
    std::map<std::int64_t, double> atoms;
    for (const auto& c : mu.cells()) atoms[e(c.k)] += c.mass;
    const double total = mu.total_mass();
    double h = 0.0;
    for (const auto& [label, w] : atoms) h += plogp(w / total);
    return h;
}

double joint_entropy(const DyadicMeasure1D& mu, const CellLabeler& e, const CellLabeler& f) {
    std::map<std::pair<std::int64_t, std::int64_t>, double> atoms;
    for (const auto& c : mu.cells()) atoms[{e(c.k), f(c.k)}] += c.mass;
    const double total = mu.total_mass();
    double h = 0.0;
    for (const auto& [label, w] : atoms) h += plogp(w / total);
    return h;
}

double conditional_partition_entropy(const DyadicMeasure1D& mu, const CellLabeler& e, const CellLabeler& f) {
    std::map<std::int64_t, std::map<std::int64_t, double>> atoms;
    for (const auto& c : mu.cells()) atoms[f(c.k)][e(c.k)] += c.mass;
    const double total = mu.total_mass();
    double h = 0.0;
    for (const auto& [fl, inner] : atoms) {
        double mf = 0.0;
        for (const auto& [el, w] : inner) mf += w;
        double hf = 0.0;
        for (const auto& [el, w] : inner) hf += plogp(w / mf);
        h += (mf / total) * hf;
    }
    return h;
}

double mean_component_entropy(const DyadicMeasure1D& mu, int m, int lo, int hi) {
    if (m < 1) throw std::invalid_argument("component entropy needs m >= 1");
    if (lo < 0 || lo > hi) throw std::invalid_argument("component entropy: bad level range");
    if (hi + m > mu.level()) {
        throw std::invalid_argument("component entropy: level " + std::to_string(hi + m) + " exceeds resolution");
    }
    const double total = mu.total_mass();
    double sum = 0.0;
    for (int i = lo; i <= hi; ++i) {
        double level_sum = 0.0;
        for_each_component(mu, i, [&](const ComponentView& v) {
            level_sum += (v.mass / total) * span_entropy(v.cells, mu.level() - (i + m), v.mass);
        });
        sum += level_sum;
    }
    return sum / (static_cast<double>(hi - lo + 1) * m);
}

MultiscaleReport multiscale_check(const DyadicMeasure1D& mu, int m, int n) {
    if (m < 1 || m >= n) throw std::invalid_argument("multiscale_check needs 1 <= m < n");
    MultiscaleReport r;
    r.lhs = entropy(mu, n).value_bits / n;
    r.rhs = mean_component_entropy(mu, m, 1, n);
    r.gap = r.lhs - r.rhs;
    return r;
}

PorosityVerdict entropy_porosity_test(const DyadicMeasure1D& mu, double h, double delta, int m, int n1, int n2) {
    if (m < 1 || n1 < 0 || n1 > n2) throw std::invalid_argument("entropy_porosity_test: bad scale range");
    if (n2 + m > mu.level()) throw std::invalid_argument("entropy_porosity_test: n2 + m exceeds resolution");
    const double total = mu.total_mass();
    double p = 0.0;
    for (int i = n1; i <= n2; ++i) {
        for_each_component(mu, i, [&](const ComponentView& v) {
            const double hc = span_entropy(v.cells, mu.level() - (i + m), v.mass) / m;
            if (hc <= h + delta) p += v.mass / total;
        });
    }
    p /= static_cast<double>(n2 - n1 + 1);
    p = std::clamp(p, 0.0, 1.0);
    return {h, delta, m, n1, n2, p, p > 1.0 - delta};
}

double max_component_entropy(const DyadicMeasure1D& mu, int m, int n1, int n2) {
    if (n2 + m > mu.level()) throw std::invalid_argument("max_component_entropy: n2 + m exceeds resolution");
    double best = 0.0;
    for (int i = n1; i <= n2; ++i) {
        for_each_component(mu, i, [&](const ComponentView& v) {
            best = std::max(best, span_entropy(v.cells, mu.level() - (i + m), v.mass) / m);
        });
    }
    return best;
}

double component_porosity_failure(const DyadicMeasure1D& mu, double h, double delta, int m, int n, int k) {
    if (n + k + m > mu.level()) throw std::invalid_argument("component_porosity_failure: scales exceed resolution");
    const double total = mu.total_mass();
    double failing = 0.0;
    for (int i = 0; i <= n; ++i) {
        for_each_component(mu, i, [&](const ComponentView& outer) {
            // Components of the component at level j are components of mu inside the outer cell.
            double p = 0.0;
            for (int j = i; j <= i + k; ++j) {
                const int shift = mu.level() - j;
                std::size_t b = 0;
                const auto& cs = outer.cells;
                while (b < cs.size()) {
                    const std::int64_t q = cs[b].k >> shift;
                    std::size_t e = b;
                    double w = 0.0;
                    while (e < cs.size() && (cs[e].k >> shift) == q) w += cs[e++].mass;
                    const double hc = span_entropy(cs.subspan(b, e - b), mu.level() - (j + m), w) / m;
                    if (hc <= h + delta) p += w / outer.mass;
                    b = e;
                }
            }
            p /= static_cast<double>(k + 1);
            if (!(p > 1.0 - delta)) failing += outer.mass / total;
        });
    }
    return failing / static_cast<double>(n + 1);
}

double ls_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("ls_slope: need two or more points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        mx += x[j];
        my += y[j];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        sxy += (x[j] - mx) * (y[j] - my);
        sxx += (x[j] - mx) * (x[j] - mx);
    }
    if (sxx == 0.0) throw std::invalid_argument("ls_slope: degenerate abscissae");
    return sxy / sxx;
}

EdimReport edim_from_entropies(const std::vector<EdimRow>& table) {
    if (table.empty()) throw std::invalid_argument("entropy_dim_estimate: empty table");
    EdimReport r;
    r.table = table;
    const int n_max = table.back().n;
    const int lo = std::max(1, (n_max + 1) / 2);
    std::vector<double> xs, ys;
    for (const auto& row : table) {
        if (row.n >= lo) {
            xs.push_back(row.n);
            ys.push_back(row.h_bits);
        }
    }
    r.slope = xs.size() >= 2 ? ls_slope(xs, ys) : table.back().h_over_n;
    const int tail = (n_max + 3) / 4;
    r.upper = -1.0;
    r.lower = 1e300;
    for (const auto& row : table) {
        if (row.n > n_max - tail) {
            r.upper = std::max(r.upper, row.h_over_n);
            r.lower = std::min(r.lower, row.h_over_n);
        }
    }
    return r;
}

EdimReport entropy_dim_estimate(const DyadicMeasure1D& mu, int n_max) {
    require_level(mu, n_max);
    if (n_max < 1) throw std::invalid_argument("entropy_dim_estimate: n_max must be positive");
    std::vector<EdimRow> table;
    for (int n = 1; n <= n_max; ++n) {
        const double h = entropy(mu, n).value_bits;
        table.push_back({n, h, h / n});
    }
    return edim_from_entropies(table);
}

EdimReport entropy_dim_estimate(const std::function<DyadicMeasure1D(int)>& generator, int n_max) {
    if (n_max < 1) throw std::invalid_argument("entropy_dim_estimate: n_max must be positive");
    std::vector<EdimRow> table;
    for (int n = 1; n <= n_max; ++n) {
        const auto mu = generator(n);
        const double h = entropy(mu, n).value_bits;
        table.push_back({n, h, h / n});
    }
    return edim_from_entropies(table);
}

std::string edim_csv(const EdimReport& r) {
    std::string s = "n,H_bits,H_over_n\n";
    char buf[96];
    for (const auto& row : r.table) {
        std::snprintf(buf, sizeof buf, "%d,%.12f,%.12f\n", row.n, row.h_bits, row.h_over_n);
        s += buf;
    }
    return s;
}

double local_dimension(const DyadicMeasure1D& mu, double x, int n) {
    require_level(mu, n);
    if (n < 1) throw std::invalid_argument("local_dimension: n must be positive");
    const std::int64_t p = mu.index_of(x) >> (mu.level() - n);
    const double m = mu.cell_mass(n, p) / mu.total_mass();
    if (!(m > 0.0)) throw std::invalid_argument("local_dimension: zero-mass cell");
    return -std::log2(m) / n;
}

std::int64_t entropy_average_scale(int i, double tau) {
    return static_cast<std::int64_t>(std::floor(std::pow(static_cast<double>(i), 1.0 + tau) + 1e-12));
}

double pointwise_dim_estimate(const DyadicMeasure1D& mu, double x, double tau, int K) {
    if (K < 1 || !(tau > 0.0)) throw std::invalid_argument("pointwise_dim_estimate needs K >= 1, tau > 0");
    if (entropy_average_scale(K, tau) > mu.level()) {
        throw std::invalid_argument("pointwise_dim_estimate: n_K exceeds resolution");
    }
    const std::int64_t k = mu.index_of(x);
    double sum = 0.0;
    for (int i = 0; i < K; ++i) {
        const auto ni = static_cast<int>(entropy_average_scale(i, tau));
        const auto nj = static_cast<int>(entropy_average_scale(i + 1, tau));
        const auto cells = mu.cells_in(ni, k >> (mu.level() - ni));
        double w = 0.0;
        for (const auto& c : cells) w += c.mass;
        if (!(w > 0.0)) throw std::invalid_argument("pointwise_dim_estimate: x outside support");
        sum += span_entropy(cells, mu.level() - nj, w) / (nj - ni);
    }
    return std::max(0.0, sum / K - tau);
}

}  // namespace msl
