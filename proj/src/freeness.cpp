#include "msl/freeness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include <boost/container_hash/hash.hpp>
#include <json.hpp>

namespace msl {

namespace {

std::string trim_copy(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim_copy(s.substr(start, pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

// Affine map in t whose coefficients are polynomials in s: x -> X(s) x + t E(s) + F(s).
struct SymbolicMap {
    Polynomial x{{ExactScalar(1)}};
    Polynomial e;
    Polynomial f;

    void apply_fixed(const ExactAffineMap& phi) {
        const Polynomial a{{phi.a}};
        x = a * x;
        e = a * e;
        f = a * f + Polynomial{{phi.b}};
    }
    void apply_gamma() {
        const Polynomial s = Polynomial::monomial(ExactScalar(1), 1);
        x = s * x;
        e = s * e + Polynomial{{ExactScalar(1)}};
        f = s * f;
    }
};

SymbolicMap alternating_symbolic(const std::vector<ExactAffineMap>& blocks) {
    SymbolicMap out;
    for (std::size_t j = 0; j < blocks.size(); ++j) {
        if (j > 0) out.apply_gamma();
        out.apply_fixed(blocks[j]);
    }
    return out;
}

ExactScalar random_rational(Rng& rng, bool positive) {
    const auto den = static_cast<long long>(rng.below(16)) + 1;
    long long num = positive ? static_cast<long long>(rng.below(64)) + 1 : static_cast<long long>(rng.below(129)) - 64;
    return ExactScalar(Rational(num, den));
}

// Positive roots of a square-free polynomial, located numerically on a logarithmic grid.
std::vector<double> numeric_positive_roots(const Polynomial& p) {
    std::vector<double> out;
    double prev_s = 1e-8;
    double prev_v = p.eval(prev_s);
    for (int j = 1; j <= 4000; ++j) {
        const double s = std::pow(10.0, -8.0 + 16.0 * j / 4000.0);
        const double v = p.eval(s);
        if (v == 0.0) {
            out.push_back(s);
        } else if ((prev_v < 0.0) != (v < 0.0) && prev_v != 0.0) {
            double lo = prev_s, hi = s, vlo = prev_v;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double vm = p.eval(mid);
                if ((vm < 0.0) == (vlo < 0.0)) {
                    lo = mid;
                    vlo = vm;
                } else {
                    hi = mid;
                }
            }
            out.push_back(0.5 * (lo + hi));
        }
        prev_s = s;
        prev_v = v;
    }
    return out;
}

Polynomial derivative(const Polynomial& p) {
    std::vector<ExactScalar> c;
    for (std::size_t j = 1; j < p.coeffs().size(); ++j) c.push_back(p.coeffs()[j] * static_cast<long long>(j));
    return Polynomial(std::move(c));
}

}  // namespace

ExactAffineMap::ExactAffineMap(ExactScalar a_, ExactScalar b_) : a(std::move(a_)), b(std::move(b_)) {
    if (a.is_zero()) throw std::invalid_argument("ExactAffineMap: a must be nonzero");
}

std::size_t ExactAffineMap::hash() const {
    std::size_t h = a.hash();
    boost::hash_combine(h, b.hash());
    return h;
}

ExactAffineMap compose(const ExactAffineMap& phi, const ExactAffineMap& psi) {
    return {phi.a * psi.a, phi.a * psi.b + phi.b};
}

ExactAffineMap parse_exact_map(const std::string& text) {
    std::optional<ExactScalar> a, b;
    for (const auto& part : split(text, ',')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("map '" + text + "': expected key=value");
        const std::string key = trim_copy(part.substr(0, eq));
        const ExactScalar v = parse_scalar(part.substr(eq + 1));
        if (key == "a" || key == "s") {
            a = v;
        } else if (key == "b" || key == "t") {
            b = v;
        } else {
            throw std::invalid_argument("map '" + text + "': unknown key '" + key + "'");
        }
    }
    if (!a || !b) throw std::invalid_argument("map '" + text + "': need both a and b");
    return {*a, *b};
}

std::vector<ExactAffineMap> parse_exact_maps(const std::string& text) {
    std::vector<ExactAffineMap> out;
    for (const auto& part : split(text, ';')) {
        if (!part.empty()) out.push_back(parse_exact_map(part));
    }
    return out;
}

ExactAffineMap eval_word(const Word& w, const std::vector<ExactAffineMap>& assignment) {
    if (w.empty()) throw std::invalid_argument("eval_word: empty word");
    ExactAffineMap out;
    for (int letter : w) {
        if (letter < 0 || static_cast<std::size_t>(letter) >= assignment.size()) {
            throw std::invalid_argument("eval_word: unassigned letter z" + std::to_string(letter + 1));
        }
        out = compose(assignment[static_cast<std::size_t>(letter)], out);
    }
    return out;
}

std::string word_str(const Word& w) {
    std::string s;
    for (int letter : w) s += "z" + std::to_string(letter + 1);
    return s;
}

FreenessResult check_free(const std::vector<ExactAffineMap>& maps, int L, std::int64_t state_cap) {
    if (maps.empty()) throw std::invalid_argument("check_free: empty set");
    if (L < 1) throw std::invalid_argument("check_free: L must be >= 1");
    const auto alphabet = static_cast<std::int64_t>(maps.size());
    std::int64_t total = 0, level = 1;
    for (int k = 1; k <= L; ++k) {
        if (level > state_cap / alphabet) throw std::length_error("check_free: word count exceeds state cap");
        level *= alphabet;
        total += level;
        if (total > state_cap) throw std::length_error("check_free: word count exceeds state cap");
    }

    struct Node {
        ExactAffineMap map;
        std::int64_t parent;
        int letter;
    };
    std::vector<Node> nodes;
    nodes.reserve(static_cast<std::size_t>(total));
    std::unordered_map<ExactAffineMap, std::int64_t, ExactAffineMapHash> seen;
    seen.reserve(static_cast<std::size_t>(total));
    auto word_of = [&nodes](std::int64_t j) {
        Word w;
        for (; j >= 0; j = nodes[static_cast<std::size_t>(j)].parent) w.push_back(nodes[static_cast<std::size_t>(j)].letter);
        std::reverse(w.begin(), w.end());
        return w;
    };

    std::int64_t begin = 0, end = 0;
    for (int k = 1; k <= L; ++k) {
        const std::int64_t parents_begin = begin, parents_end = end;
        begin = static_cast<std::int64_t>(nodes.size());
        const bool first = k == 1;
        for (std::int64_t j = first ? -1 : parents_begin; j < (first ? 0 : parents_end); ++j) {
            for (int letter = 0; letter < static_cast<int>(alphabet); ++letter) {
                const auto& g = maps[static_cast<std::size_t>(letter)];
                ExactAffineMap m = first ? g : compose(g, nodes[static_cast<std::size_t>(j)].map);
                const auto idx = static_cast<std::int64_t>(nodes.size());
                auto [it, inserted] = seen.try_emplace(m, idx);
                nodes.push_back({std::move(m), j, letter});
                if (!inserted) return Relation{word_of(it->second), word_of(idx)};
            }
        }
        end = static_cast<std::int64_t>(nodes.size());
    }
    return FreeUpTo{L, static_cast<std::int64_t>(nodes.size())};
}

std::string certificate_json(const FreenessResult& r) {
    nlohmann::json j;
    if (const auto* f = std::get_if<FreeUpTo>(&r)) {
        j["free_up_to"] = f->length;
        j["words_checked"] = f->words_checked;
    } else {
        const auto& rel = std::get<Relation>(r);
        auto one_based = [](const Word& w) {
            std::vector<int> v;
            for (int x : w) v.push_back(x + 1);
            return v;
        };
        j["w"] = one_based(rel.w);
        j["w_prime"] = one_based(rel.w_prime);
    }
    return j.dump();
}

Polynomial::Polynomial(std::vector<ExactScalar> coeffs) : c_(std::move(coeffs)) { trim(); }

Polynomial Polynomial::monomial(const ExactScalar& c, int degree) {
    std::vector<ExactScalar> v(static_cast<std::size_t>(degree) + 1, ExactScalar(0));
    v.back() = c;
    return Polynomial(std::move(v));
}

void Polynomial::trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

ExactScalar Polynomial::operator()(const ExactScalar& s) const {
    ExactScalar v(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * s + *it;
    return v;
}

double Polynomial::eval(double s) const {
    double v = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * s + it->to_double();
    return v;
}

std::string Polynomial::str() const {
    if (c_.empty()) return "0";
    std::string s;
    for (std::size_t j = 0; j < c_.size(); ++j) {
        if (c_[j].is_zero()) continue;
        if (!s.empty()) s += " + ";
        s += "(" + c_[j].str() + ")";
        if (j >= 1) s += "*s";
        if (j >= 2) s += "^" + std::to_string(j);
    }
    return s;
}

Polynomial operator+(const Polynomial& x, const Polynomial& y) {
    std::vector<ExactScalar> c(std::max(x.c_.size(), y.c_.size()), ExactScalar(0));
    for (std::size_t j = 0; j < x.c_.size(); ++j) c[j] += x.c_[j];
    for (std::size_t j = 0; j < y.c_.size(); ++j) c[j] += y.c_[j];
    return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& x, const Polynomial& y) {
    std::vector<ExactScalar> c(std::max(x.c_.size(), y.c_.size()), ExactScalar(0));
    for (std::size_t j = 0; j < x.c_.size(); ++j) c[j] += x.c_[j];
    for (std::size_t j = 0; j < y.c_.size(); ++j) c[j] -= y.c_[j];
    return Polynomial(std::move(c));
}

Polynomial operator*(const Polynomial& x, const Polynomial& y) {
    if (x.is_zero() || y.is_zero()) return {};
    std::vector<ExactScalar> c(x.c_.size() + y.c_.size() - 1, ExactScalar(0));
    for (std::size_t i = 0; i < x.c_.size(); ++i) {
        for (std::size_t j = 0; j < y.c_.size(); ++j) c[i + j] += x.c_[i] * y.c_[j];
    }
    return Polynomial(std::move(c));
}

std::pair<Polynomial, Polynomial> divmod(const Polynomial& x, const Polynomial& y) {
    if (y.is_zero()) throw std::domain_error("polynomial division by zero");
    Polynomial q, r = x;
    while (!r.is_zero() && r.degree() >= y.degree()) {
        const Polynomial t = Polynomial::monomial(r.lead() / y.lead(), r.degree() - y.degree());
        q = q + t;
        r = r - t * y;
    }
    return {q, r};
}

Polynomial gcd(const Polynomial& x, const Polynomial& y) {
    Polynomial a = x, b = y;
    while (!b.is_zero()) {
        auto r = divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    if (a.is_zero()) return a;
    return divmod(a, Polynomial{{a.lead()}}).first;
}

PolynomialRoots positive_roots(const Polynomial& p) {
    PolynomialRoots out;
    if (p.degree() < 1) return out;
    // Square-free part, then strip the root s = 0.
    Polynomial sf = divmod(p, gcd(p, derivative(p))).first;
    while (!sf.is_zero() && sf.coeffs().front().is_zero()) {
        sf = Polynomial(std::vector<ExactScalar>(sf.coeffs().begin() + 1, sf.coeffs().end()));
    }
    auto keep = [&out](const ExactScalar& r) {
        if (r.sign() > 0 && std::find(out.exact.begin(), out.exact.end(), r) == out.exact.end()) out.exact.push_back(r);
    };
    if (sf.degree() == 1) {
        keep(-sf.coeffs()[0] / sf.coeffs()[1]);
        return out;
    }
    if (sf.degree() == 2) {
        const auto& c = sf.coeffs();
        try {
            const ExactScalar disc = c[1] * c[1] - ExactScalar(4) * c[2] * c[0];
            if (disc.sign() < 0) return out;
            if (auto r = exact_sqrt(disc)) {
                keep((-c[1] + *r) / (ExactScalar(2) * c[2]));
                keep((-c[1] - *r) / (ExactScalar(2) * c[2]));
                return out;
            }
        } catch (const std::invalid_argument&) {
            // The roots live in a different quadratic field; fall through to numerics.
        }
    }
    if (sf.degree() >= 2) out.approximate = numeric_positive_roots(sf);
    return out;
}

const char* kind_name(SolutionKind k) {
    switch (k) {
        case SolutionKind::Empty: return "Empty";
        case SolutionKind::FinitePoints: return "FinitePoints";
        case SolutionKind::Line: return "Line";
        case SolutionKind::Curve: return "Curve";
        case SolutionKind::AllOfGPlus: return "AllOfGPlus";
    }
    return "?";
}

std::string RelationSolutionSet::describe() const {
    std::string s = kind_name(kind);
    switch (kind) {
        case SolutionKind::FinitePoints:
            for (const auto& [ps, pt] : points) s += " (s=" + ps.str() + ", t=" + pt.str() + ")";
            break;
        case SolutionKind::Curve: s += " t = -(" + f.str() + ")/(" + e.str() + ")"; break;
        default: break;
    }
    if (graph) s += " t = (" + graph->first.str() + ")*s + (" + graph->second.str() + ")";
    for (const auto& v : vertical) s += " s = " + v.str();
    for (double v : approximate_vertical) s += " s ~ " + std::to_string(v);
    if (!exact) s += " [inexact]";
    return s;
}

std::string RelationSolutionSet::to_json() const {
    nlohmann::json j;
    j["kind"] = kind_name(kind);
    j["m"] = m;
    j["n"] = n;
    auto coeffs = [](const Polynomial& p) {
        std::vector<std::string> v;
        for (const auto& c : p.coeffs()) v.push_back(c.str());
        return v;
    };
    j["e"] = coeffs(e);
    j["f"] = coeffs(f);
    j["points"] = nlohmann::json::array();
    for (const auto& [ps, pt] : points) j["points"].push_back({{"s", ps.str()}, {"t", pt.str()}});
    j["vertical"] = nlohmann::json::array();
    for (const auto& v : vertical) j["vertical"].push_back(v.str());
    if (graph) j["graph"] = {{"alpha", graph->first.str()}, {"beta", graph->second.str()}};
    j["approximate_vertical"] = approximate_vertical;
    j["exact"] = exact;
    return j.dump();
}

RelationSolutionSet relation_solution_set(const std::vector<ExactAffineMap>& phi,
                                          const std::vector<ExactAffineMap>& psi) {
    if (phi.empty() || psi.empty()) {
        throw std::invalid_argument("relation_solution_set: each side needs at least the map phi_0");
    }
    RelationSolutionSet out;
    out.m = static_cast<int>(phi.size()) - 1;
    out.n = static_cast<int>(psi.size()) - 1;
    const SymbolicMap lhs = alternating_symbolic(phi);
    const SymbolicMap rhs = alternating_symbolic(psi);
    out.e = lhs.e - rhs.e;
    out.f = lhs.f - rhs.f;
    const ExactScalar a_prod = lhs.x.lead();
    const ExactScalar c_prod = rhs.x.lead();

    if (out.m != out.n) {
        // s^(m-n) = C / A has at most one positive solution.
        int k = out.m - out.n;
        ExactScalar r = c_prod / a_prod;
        if (k < 0) {
            k = -k;
            r = r.inverse();
        }
        if (r.sign() <= 0) return out;
        if (auto s0 = exact_root(r, k)) {
            const ExactScalar ev = out.e(*s0);
            const ExactScalar fv = out.f(*s0);
            if (!ev.is_zero()) {
                out.kind = SolutionKind::FinitePoints;
                out.points.emplace_back(*s0, -fv / ev);
            } else if (fv.is_zero()) {
                out.kind = SolutionKind::Line;
                out.vertical.push_back(*s0);
            }
            return out;
        }
        // No closed form: decide numerically and say so.
        out.exact = false;
        const double s0 = std::pow(r.to_double(), 1.0 / k);
        const double ev = out.e.eval(s0);
        const double fv = out.f.eval(s0);
        const double tol = 1e-9 * (1.0 + std::abs(s0));
        if (std::abs(ev) > tol) {
            out.kind = SolutionKind::FinitePoints;
        } else if (std::abs(fv) <= tol) {
            out.kind = SolutionKind::Line;
        }
        if (out.kind != SolutionKind::Empty) out.approximate_vertical.push_back(s0);
        return out;
    }

    if (a_prod != c_prod) return out;  // s^m (A - C) = 0 has no solution with s > 0

    if (out.e.is_zero()) {
        if (out.f.is_zero()) {
            out.kind = SolutionKind::AllOfGPlus;
            return out;
        }
        const auto roots = positive_roots(out.f);
        out.vertical = roots.exact;
        out.approximate_vertical = roots.approximate;
        out.exact = roots.approximate.empty();
        if (!out.vertical.empty() || !out.approximate_vertical.empty()) out.kind = SolutionKind::Line;
        return out;
    }

    // Vertical lines where e and f vanish together.
    const auto common = positive_roots(gcd(out.e, out.f));
    out.vertical = common.exact;
    out.approximate_vertical = common.approximate;
    out.exact = common.approximate.empty();
    const auto [q, r] = divmod(out.f, out.e);
    if (r.is_zero() && q.degree() <= 1) {
        const ExactScalar beta = q.is_zero() ? ExactScalar(0) : -q.coeffs()[0];
        const ExactScalar alpha = q.degree() == 1 ? -q.coeffs()[1] : ExactScalar(0);
        out.kind = SolutionKind::Line;
        out.graph = std::make_pair(alpha, beta);
    } else {
        out.kind = SolutionKind::Curve;
    }
    return out;
}

std::vector<ExactAffineMap> alternating_form(const Word& w, const std::vector<ExactAffineMap>& assignment,
                                             int gamma) {
    std::vector<ExactAffineMap> blocks;
    ExactAffineMap current;
    for (int letter : w) {
        if (letter == gamma) {
            blocks.push_back(current);
            current = ExactAffineMap();
            continue;
        }
        if (letter < 0 || static_cast<std::size_t>(letter) >= assignment.size()) {
            throw std::invalid_argument("alternating_form: unassigned letter z" + std::to_string(letter + 1));
        }
        current = compose(assignment[static_cast<std::size_t>(letter)], current);
    }
    blocks.push_back(current);
    return blocks;
}

std::pair<ExactAffineMap, ExactAffineMap> evaluate_alternating(const std::vector<ExactAffineMap>& phi,
                                                               const std::vector<ExactAffineMap>& psi,
                                                               const ExactAffineMap& gamma) {
    auto eval = [&gamma](const std::vector<ExactAffineMap>& blocks) {
        ExactAffineMap out;
        for (std::size_t j = 0; j < blocks.size(); ++j) {
            if (j > 0) out = compose(gamma, out);
            out = compose(blocks[j], out);
        }
        return out;
    };
    return {eval(phi), eval(psi)};
}

std::vector<ExactAffineMap> sample_solutions(const RelationSolutionSet& set, int count, Rng& rng) {
    std::vector<ExactAffineMap> out;
    if (set.kind == SolutionKind::Empty || !set.exact) return out;
    if (set.kind == SolutionKind::FinitePoints) {
        for (const auto& [s, t] : set.points) out.emplace_back(s, t);
        return out;
    }
    // Families to draw from: each vertical line, plus the graph/curve/everything when present.
    const bool has_main = set.kind != SolutionKind::Line || set.graph.has_value();
    const auto families = set.vertical.size() + (has_main ? 1 : 0);
    if (families == 0) return out;
    for (int j = 0; j < count; ++j) {
        const auto pick = static_cast<std::size_t>(j) % families;
        if (pick < set.vertical.size()) {
            out.emplace_back(set.vertical[pick], random_rational(rng, false));
            continue;
        }
        ExactScalar s = random_rational(rng, true);
        switch (set.kind) {
            case SolutionKind::AllOfGPlus: out.emplace_back(s, random_rational(rng, false)); break;
            case SolutionKind::Line: out.emplace_back(s, set.graph->first * s + set.graph->second); break;
            case SolutionKind::Curve: {
                ExactScalar ev = set.e(s);
                while (ev.is_zero()) {
                    s = random_rational(rng, true);
                    ev = set.e(s);
                }
                out.emplace_back(s, -set.f(s) / ev);
                break;
            }
            default: break;
        }
    }
    return out;
}

int power_for_separation(const ExactScalar& a) {
    const ExactScalar r = a.abs();
    if (r.is_zero()) throw std::invalid_argument("power_for_separation: a = 0");
    if (r == ExactScalar(1)) throw std::invalid_argument("power_for_separation: |a| = 1");
    const ExactScalar half(Rational(1, 2));
    const ExactScalar two(2);
    int k = 1;
    for (ExactScalar p = r; p > half && p < two; p *= r) ++k;
    return k;
}

std::vector<ExactAffineMap> greedy_free_extension(const std::vector<ExactAffineMap>& pool,
                                                  std::vector<ExactAffineMap> delta, int L,
                                                  std::int64_t state_cap) {
    if (!delta.empty() && !std::holds_alternative<FreeUpTo>(check_free(delta, L, state_cap))) {
        throw std::invalid_argument("greedy_free_extension: the starting set is not free up to L");
    }
    for (const auto& g : pool) {
        delta.push_back(g);
        if (!std::holds_alternative<FreeUpTo>(check_free(delta, L, state_cap))) delta.pop_back();
    }
    return delta;
}

ImplicationBound implication_bound(const Rational& r0, int k) {
    if (!(r0 > 0) || !(r0 < 1)) throw std::invalid_argument("implication_bound: r0 must lie in (0,1)");
    if (k < 1) throw std::invalid_argument("implication_bound: k must be >= 1");
    const Rational x = ExactScalar(r0).pow(2 * k).p();
    const BigInt num = boost::multiprecision::numerator(x);
    const BigInt den = boost::multiprecision::denominator(x);
    ImplicationBound out;
    out.ell = (den + num - 1) / num;
    out.verified = Rational(out.ell) * x >= 1;
    return out;
}

}  // namespace msl
