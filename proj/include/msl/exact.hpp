#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace msl {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// p + q sqrt(d) with p, q rational and d a squarefree integer > 1, or d = 0 when q = 0.
// Values with different nonzero d never mix; doing so throws.
class ExactScalar {
public:
    ExactScalar() = default;
    ExactScalar(long long v) : p_(v) {}  // NOLINT: implicit from integers is convenient in formulas
    explicit ExactScalar(Rational p, Rational q = 0, std::int64_t d = 0);

    // sqrt(n) for an integer n >= 0, with square factors pulled out.
    static ExactScalar sqrt_of(std::int64_t n);

    const Rational& p() const { return p_; }
    const Rational& q() const { return q_; }
    std::int64_t d() const { return d_; }
    bool is_rational() const { return d_ == 0; }
    bool is_zero() const { return d_ == 0 && p_ == 0; }

    int sign() const;
    ExactScalar abs() const { return sign() < 0 ? -*this : *this; }
    ExactScalar inverse() const;
    ExactScalar pow(int k) const;
    // The conjugate p - q sqrt(d).
    ExactScalar conjugate() const { return ExactScalar(p_, -q_, d_); }
    double to_double() const;
    std::string str() const;
    std::size_t hash() const;

    ExactScalar operator-() const { return ExactScalar(-p_, -q_, d_); }
    friend ExactScalar operator+(const ExactScalar& x, const ExactScalar& y);
    friend ExactScalar operator-(const ExactScalar& x, const ExactScalar& y);
    friend ExactScalar operator*(const ExactScalar& x, const ExactScalar& y);
    friend ExactScalar operator/(const ExactScalar& x, const ExactScalar& y);
    ExactScalar& operator+=(const ExactScalar& y) { return *this = *this + y; }
    ExactScalar& operator-=(const ExactScalar& y) { return *this = *this - y; }
    ExactScalar& operator*=(const ExactScalar& y) { return *this = *this * y; }

    friend bool operator==(const ExactScalar& x, const ExactScalar& y) {
        return x.d_ == y.d_ && x.p_ == y.p_ && x.q_ == y.q_;
    }
    friend bool operator<(const ExactScalar& x, const ExactScalar& y) { return (x - y).sign() < 0; }
    friend bool operator>(const ExactScalar& x, const ExactScalar& y) { return y < x; }
    friend bool operator<=(const ExactScalar& x, const ExactScalar& y) { return !(y < x); }
    friend bool operator>=(const ExactScalar& x, const ExactScalar& y) { return !(x < y); }

private:
    Rational p_ = 0;
    Rational q_ = 0;
    std::int64_t d_ = 0;
};

// Expressions over integers, decimals, sqrtN / sqrt(N), + - * / and parentheses:
// "3/2", "0.9", "(1+sqrt5)/2", "-1/2*sqrt(5)".
ExactScalar parse_scalar(const std::string& text);

// Exact k-th root of a positive rational, if it is rational.
std::optional<Rational> rational_root(const Rational& x, int k);

// Exact square root inside Q or Q(sqrt d), when it exists there (or in Q(sqrt d') for rational x).
std::optional<ExactScalar> exact_sqrt(const ExactScalar& x);

// Exact positive k-th root of x > 0, found by rational roots and repeated square roots.
std::optional<ExactScalar> exact_root(const ExactScalar& x, int k);

struct ExactScalarHash {
    std::size_t operator()(const ExactScalar& x) const { return x.hash(); }
};

}  // namespace msl
