#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "msl/exact.hpp"
#include "msl/random.hpp"

namespace msl {

// x -> a x + b with a != 0. Linear-scale parameters, unlike AffineMap's log-scale group coordinates.
struct ExactAffineMap {
    ExactScalar a{1};
    ExactScalar b{0};

    ExactAffineMap() = default;
    ExactAffineMap(ExactScalar a_, ExactScalar b_);

    bool orientation_preserving() const { return a.sign() > 0; }
    ExactScalar operator()(const ExactScalar& x) const { return a * x + b; }
    std::string str() const { return "a=" + a.str() + ",b=" + b.str(); }
    std::size_t hash() const;
    friend bool operator==(const ExactAffineMap&, const ExactAffineMap&) = default;
};

struct ExactAffineMapHash {
    std::size_t operator()(const ExactAffineMap& f) const { return f.hash(); }
};

// phi ∘ psi.
ExactAffineMap compose(const ExactAffineMap& phi, const ExactAffineMap& psi);

// "a=3/2,b=0" (also accepts s= / t=). Lists are separated by ';'.
ExactAffineMap parse_exact_map(const std::string& text);
std::vector<ExactAffineMap> parse_exact_maps(const std::string& text);

// Letters are 0-based indices into the assignment. The first letter acts first, so
// eval(z_{i1} ... z_{ik}) = phi_{ik} ∘ ... ∘ phi_{i1}: the coefficient of x is the product of
// the a's and the constant is sum_i b_i prod_{j>i} a_j.
using Word = std::vector<int>;

ExactAffineMap eval_word(const Word& w, const std::vector<ExactAffineMap>& assignment);

// 1-based letters, e.g. "z1z2z2".
std::string word_str(const Word& w);

struct FreeUpTo {
    int length = 0;
    std::int64_t words_checked = 0;
};

struct Relation {
    Word w;        // earlier in length-then-lex order
    Word w_prime;  // later word with the same map
};

using FreenessResult = std::variant<FreeUpTo, Relation>;

inline constexpr std::int64_t kDefaultWordCap = 2000000;

// Enumerates all words of length 1..L in length-then-lex order and reports the first collision.
// Throws std::length_error when the number of words would exceed state_cap.
FreenessResult check_free(const std::vector<ExactAffineMap>& maps, int L, std::int64_t state_cap = kDefaultWordCap);

// {"free_up_to":L,"words_checked":N} or {"w":[...],"w_prime":[...]} with 1-based letters.
std::string certificate_json(const FreenessResult& r);

// Single polynomial in s with coefficients in one quadratic field, lowest degree first, no trailing zeros.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<ExactScalar> coeffs);
    static Polynomial monomial(const ExactScalar& c, int degree);

    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for the zero polynomial
    bool is_zero() const { return c_.empty(); }
    const std::vector<ExactScalar>& coeffs() const { return c_; }
    const ExactScalar& lead() const { return c_.back(); }
    ExactScalar operator()(const ExactScalar& s) const;
    double eval(double s) const;
    std::string str() const;

    friend Polynomial operator+(const Polynomial& x, const Polynomial& y);
    friend Polynomial operator-(const Polynomial& x, const Polynomial& y);
    friend Polynomial operator*(const Polynomial& x, const Polynomial& y);
    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    void trim();
    std::vector<ExactScalar> c_;
};

// Quotient and remainder, y nonzero.
std::pair<Polynomial, Polynomial> divmod(const Polynomial& x, const Polynomial& y);
// Monic gcd; zero if both are zero.
Polynomial gcd(const Polynomial& x, const Polynomial& y);

struct PolynomialRoots {
    std::vector<ExactScalar> exact;  // distinct positive roots found exactly
    std::vector<double> approximate;  // positive roots only located numerically
};

// Positive real roots; exact for the factors of degree <= 2 that split over the coefficient field.
PolynomialRoots positive_roots(const Polynomial& p);

enum class SolutionKind { Empty, FinitePoints, Line, Curve, AllOfGPlus };

const char* kind_name(SolutionKind k);

// The set of gamma = (s, t), s > 0, x -> s x + t, solving
//   phi_{2m} ∘ gamma ∘ ... ∘ gamma ∘ phi_0 = psi_{2n} ∘ gamma ∘ ... ∘ gamma ∘ psi_0,
// i.e. the alternating words with phi_0 acting first.
// The relation is t e(s) + f(s) = 0 together with s^m prod a = s^n prod c.
struct RelationSolutionSet {
    SolutionKind kind = SolutionKind::Empty;
    int m = 0;
    int n = 0;
    Polynomial e;
    Polynomial f;
    std::vector<std::pair<ExactScalar, ExactScalar>> points;  // FinitePoints
    std::vector<ExactScalar> vertical;                         // lines s = s0 with t free
    std::optional<std::pair<ExactScalar, ExactScalar>> graph;  // line t = alpha s + beta
    std::vector<double> approximate_vertical;                  // s-values known only numerically
    bool exact = true;                                         // false when some s-value was not found exactly

    std::string describe() const;
    std::string to_json() const;
};

// phi and psi hold the fixed maps phi_0, phi_2, ..., phi_{2m} and psi_0, ..., psi_{2n}.
RelationSolutionSet relation_solution_set(const std::vector<ExactAffineMap>& phi,
                                          const std::vector<ExactAffineMap>& psi);

// Splits a word containing the letter `gamma` into its fixed blocks (empty blocks are the identity).
std::vector<ExactAffineMap> alternating_form(const Word& w, const std::vector<ExactAffineMap>& assignment,
                                             int gamma);

// Both sides of the alternating relation evaluated at gamma.
std::pair<ExactAffineMap, ExactAffineMap> evaluate_alternating(const std::vector<ExactAffineMap>& phi,
                                                               const std::vector<ExactAffineMap>& psi,
                                                               const ExactAffineMap& gamma);

// Up to `count` exact members of the set with rational coordinates wherever the set allows.
// Empty for Empty sets and for sets known only approximately.
std::vector<ExactAffineMap> sample_solutions(const RelationSolutionSet& set, int count, Rng& rng);

// Smallest k >= 1 with |a|^k outside (1/2, 2).
int power_for_separation(const ExactScalar& a);

// Scans the pool once, appending every map that keeps delta free up to length L.
std::vector<ExactAffineMap> greedy_free_extension(const std::vector<ExactAffineMap>& pool,
                                                  std::vector<ExactAffineMap> delta, int L,
                                                  std::int64_t state_cap = kDefaultWordCap);

struct ImplicationBound {
    BigInt ell;
    bool verified = false;  // ell * r0^(2k) >= 1, checked exactly
};

ImplicationBound implication_bound(const Rational& r0, int k);

}  // namespace msl
