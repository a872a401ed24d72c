#include "msl/exact.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

#include <boost/container_hash/hash.hpp>

namespace msl {

namespace {

std::int64_t common_d(const ExactScalar& x, const ExactScalar& y) {
    if (x.d() != 0 && y.d() != 0 && x.d() != y.d()) {
        throw std::invalid_argument("exact arithmetic: mixing sqrt(" + std::to_string(x.d()) + ") and sqrt(" +
                                    std::to_string(y.d()) + ")");
    }
    return x.d() != 0 ? x.d() : y.d();
}

BigInt isqrt(const BigInt& n) { return boost::multiprecision::sqrt(n); }

// Floor of the k-th root of n >= 0 by bisection.
BigInt iroot(const BigInt& n, int k) {
    if (k == 1 || n < 2) return n;
    if (k == 2) return isqrt(n);
    BigInt lo = 0, hi = 1;
    while (boost::multiprecision::pow(hi, static_cast<unsigned>(k)) <= n) hi <<= 1;
    while (hi - lo > 1) {
        BigInt mid = (lo + hi) >> 1;
        (boost::multiprecision::pow(mid, static_cast<unsigned>(k)) <= n ? lo : hi) = mid;
    }
    return lo;
}

std::optional<BigInt> exact_iroot(const BigInt& n, int k) {
    const BigInt r = iroot(n, k);
    if (boost::multiprecision::pow(r, static_cast<unsigned>(k)) == n) return r;
    return std::nullopt;
}

// n = s^2 * f with f squarefree; trial division, so n must be moderate.
std::pair<BigInt, BigInt> square_split(BigInt n) {
    BigInt s = 1, f = 1;
    for (BigInt p = 2; p * p <= n; ++p) {
        if (p > 10000000) throw std::invalid_argument("exact_sqrt: radicand too large to factor");
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        for (int j = 0; j < e / 2; ++j) s *= p;
        if (e % 2) f *= p;
    }
    return {s, f * n};
}

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    ExactScalar parse() {
        ExactScalar v = expr();
        skip();
        if (i_ != s_.size()) fail("trailing input");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("cannot parse scalar '" + s_ + "': " + what);
    }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    ExactScalar expr() {
        ExactScalar v = term();
        for (;;) {
            if (eat('+')) {
                v = v + term();
            } else if (eat('-')) {
                v = v - term();
            } else {
                return v;
            }
        }
    }
    ExactScalar term() {
        ExactScalar v = factor();
        for (;;) {
            if (eat('*')) {
                v = v * factor();
            } else if (eat('/')) {
                const ExactScalar den = factor();
                if (den.is_zero()) fail("division by zero");
                v = v / den;
            } else {
                return v;
            }
        }
    }
    BigInt digits() {
        skip();
        const std::size_t start = i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        if (i_ == start) fail("expected digits");
        return BigInt(s_.substr(start, i_ - start));
    }
    ExactScalar factor() {
        if (eat('-')) return -factor();
        if (eat('+')) return factor();
        if (eat('(')) {
            ExactScalar v = expr();
            if (!eat(')')) fail("missing ')'");
            return v;
        }
        skip();
        if (s_.compare(i_, 4, "sqrt") == 0) {
            i_ += 4;
            const bool paren = eat('(');
            const BigInt n = digits();
            if (paren && !eat(')')) fail("missing ')'");
            if (n > BigInt(std::numeric_limits<std::int64_t>::max())) fail("radicand too large");
            return ExactScalar::sqrt_of(static_cast<std::int64_t>(n));
        }
        BigInt whole = digits();
        Rational v(whole);
        if (i_ < s_.size() && s_[i_] == '.') {
            ++i_;
            const std::size_t start = i_;
            while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
            const std::size_t len = i_ - start;
            if (len > 0) {
                const BigInt frac(s_.substr(start, len));
                v += Rational(frac, boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(len)));
            }
        }
        return ExactScalar(v);
    }

    const std::string& s_;
    std::size_t i_ = 0;
};

}  // namespace

ExactScalar::ExactScalar(Rational p, Rational q, std::int64_t d) : p_(std::move(p)), q_(std::move(q)), d_(d) {
    if (q_ == 0) {
        d_ = 0;
    } else if (d_ < 2) {
        throw std::invalid_argument("ExactScalar: sqrt part needs d >= 2");
    }
}

ExactScalar ExactScalar::sqrt_of(std::int64_t n) {
    if (n < 0) throw std::invalid_argument("sqrt of a negative integer");
    if (n == 0) return ExactScalar(0);
    const auto [s, f] = square_split(BigInt(n));
    if (f == 1) return ExactScalar(Rational(s));
    return ExactScalar(0, Rational(s), static_cast<std::int64_t>(f));
}

int ExactScalar::sign() const {
    const int sp = p_.sign();
    const int sq = q_.sign();
    if (sq == 0) return sp;
    if (sp == 0 || sp == sq) return sq;
    // Opposite signs: compare p^2 with q^2 d.
    const Rational lhs = p_ * p_;
    const Rational rhs = q_ * q_ * d_;
    if (lhs == rhs) return 0;  // cannot happen for squarefree d, kept for safety
    return lhs > rhs ? sp : sq;
}

ExactScalar operator+(const ExactScalar& x, const ExactScalar& y) {
    return ExactScalar(x.p_ + y.p_, x.q_ + y.q_, common_d(x, y));
}

ExactScalar operator-(const ExactScalar& x, const ExactScalar& y) {
    return ExactScalar(x.p_ - y.p_, x.q_ - y.q_, common_d(x, y));
}

ExactScalar operator*(const ExactScalar& x, const ExactScalar& y) {
    const std::int64_t d = common_d(x, y);
    if (d == 0) return ExactScalar(x.p_ * y.p_);
    return ExactScalar(x.p_ * y.p_ + x.q_ * y.q_ * d, x.p_ * y.q_ + x.q_ * y.p_, d);
}

ExactScalar operator/(const ExactScalar& x, const ExactScalar& y) { return x * y.inverse(); }

ExactScalar ExactScalar::inverse() const {
    if (is_zero()) throw std::domain_error("ExactScalar: inverse of zero");
    if (d_ == 0) return ExactScalar(1 / p_);
    const Rational norm = p_ * p_ - q_ * q_ * d_;
    return ExactScalar(p_ / norm, -q_ / norm, d_);
}

ExactScalar ExactScalar::pow(int k) const {
    if (k < 0) return inverse().pow(-k);
    ExactScalar result(1), base = *this;
    while (k > 0) {
        if (k & 1) result *= base;
        base *= base;
        k >>= 1;
    }
    return result;
}

double ExactScalar::to_double() const {
    const double p = static_cast<double>(p_);
    if (d_ == 0) return p;
    return p + static_cast<double>(q_) * std::sqrt(static_cast<double>(d_));
}

std::string ExactScalar::str() const {
    if (d_ == 0) return p_.str();
    std::string s = p_ == 0 ? "" : p_.str();
    if (q_ < 0) {
        s += "-";
    } else if (!s.empty()) {
        s += "+";
    }
    const Rational aq = boost::multiprecision::abs(q_);
    if (aq != 1) s += aq.str() + "*";
    return s + "sqrt" + std::to_string(d_);
}

std::size_t ExactScalar::hash() const {
    std::size_t h = std::hash<Rational>{}(p_);
    boost::hash_combine(h, std::hash<Rational>{}(q_));
    boost::hash_combine(h, d_);
    return h;
}

ExactScalar parse_scalar(const std::string& text) { return Parser(text).parse(); }

std::optional<Rational> rational_root(const Rational& x, int k) {
    if (k < 1) throw std::invalid_argument("rational_root: k must be positive");
    if (x.sign() <= 0) return std::nullopt;
    const auto num = exact_iroot(boost::multiprecision::numerator(x), k);
    const auto den = exact_iroot(boost::multiprecision::denominator(x), k);
    if (!num || !den) return std::nullopt;
    return Rational(*num, *den);
}

std::optional<ExactScalar> exact_sqrt(const ExactScalar& x) {
    const int sg = x.sign();
    if (sg < 0) return std::nullopt;
    if (sg == 0) return ExactScalar(0);
    if (x.is_rational()) {
        if (auto r = rational_root(x.p(), 2)) return ExactScalar(*r);
        // sqrt(n/m) = sqrt(n m) / m.
        const BigInt n = boost::multiprecision::numerator(x.p());
        const BigInt m = boost::multiprecision::denominator(x.p());
        const auto [s, f] = square_split(n * m);
        if (f > BigInt(std::numeric_limits<std::int64_t>::max())) return std::nullopt;
        return ExactScalar(0, Rational(s, m), static_cast<std::int64_t>(f));
    }
    // (u + v sqrt d)^2 = p + q sqrt d: u^2 + d v^2 = p, 2uv = q, so u^2 = (p +- sqrt(p^2 - d q^2)) / 2.
    const Rational disc = x.p() * x.p() - x.q() * x.q() * x.d();
    const auto r = rational_root(disc, 2);
    if (!r) return std::nullopt;
    for (const Rational& u2 : {Rational((x.p() + *r) / 2), Rational((x.p() - *r) / 2)}) {
        const auto u = rational_root(u2, 2);
        if (!u || *u == 0) continue;
        const ExactScalar cand(*u, x.q() / (2 * *u), x.d());
        if (cand * cand == x) return cand.sign() < 0 ? -cand : cand;
    }
    return std::nullopt;
}

std::optional<ExactScalar> exact_root(const ExactScalar& x, int k) {
    if (k < 1) throw std::invalid_argument("exact_root: k must be positive");
    if (x.sign() <= 0) return std::nullopt;
    if (k == 1) return x;
    if (x.is_rational()) {
        if (auto r = rational_root(x.p(), k)) return ExactScalar(*r);
    }
    if (k % 2 == 0) {
        if (auto s = exact_sqrt(x)) return exact_root(*s, k / 2);
    }
    return std::nullopt;
}

}  // namespace msl
