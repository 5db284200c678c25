#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace melkit {

// Exact rational number. Thin wrapper over GMP's mpq_class that keeps the
// value canonical at all times: denominator > 0, gcd(|num|, den) = 1,
// zero stored as 0/1. Serializes as "p/q" (or "p" when q == 1).
class Rational {
public:
    Rational() : q_(0) {}
    Rational(long n) : q_(n) {}
    Rational(long n, long d) : q_(n, d) {
        if (d == 0) throw std::domain_error("Rational: zero denominator");
        q_.canonicalize();
    }
    explicit Rational(const mpz_class& n) : q_(n) {}
    explicit Rational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

    // Accepts "p", "p/q", optional leading '-'. Rejects anything else.
    static Rational from_string(std::string_view s) {
        if (s.empty()) throw std::invalid_argument("Rational: empty string");
        const auto slash = s.find('/');
        try {
            if (slash == std::string_view::npos) {
                mpq_class q(std::string(s), 10);
                q.canonicalize();
                return Rational(std::move(q));
            }
            mpz_class num(std::string(s.substr(0, slash)), 10);
            mpz_class den(std::string(s.substr(slash + 1)), 10);
            if (den == 0) throw std::domain_error("Rational: zero denominator");
            mpq_class q(num, den);
            q.canonicalize();
            return Rational(std::move(q));
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument("Rational: cannot parse '" + std::string(s) + "'");
        }
    }

    std::string str() const {
        if (q_.get_den() == 1) return q_.get_num().get_str();
        return q_.get_num().get_str() + "/" + q_.get_den().get_str();
    }

    double to_double() const { return q_.get_d(); }

    mpz_class numerator() const { return q_.get_num(); }
    mpz_class denominator() const { return q_.get_den(); }

    bool is_zero() const { return q_ == 0; }
    int sign() const { return sgn(q_); }

    Rational abs() const { return Rational(mpq_class(::abs(q_))); }

    Rational inverse() const {
        if (is_zero()) throw std::domain_error("Rational: inverse of zero");
        mpq_class r(q_.get_den(), q_.get_num());
        r.canonicalize();
        return Rational(std::move(r));
    }

    // Integer power; negative exponents invert (zero base rejected there).
    Rational pow(int e) const {
        if (e < 0) return inverse().pow(-e);
        Rational base = *this, acc = Rational(1);
        while (e > 0) {
            if (e & 1) acc *= base;
            base *= base;
            e >>= 1;
        }
        return acc;
    }

    Rational operator-() const { return Rational(mpq_class(-q_)); }

    Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
    Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
    Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw std::domain_error("Rational: division by zero");
        q_ /= o.q_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.q_ != b.q_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.q_ < b.q_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.q_ <= b.q_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.q_ > b.q_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.q_ >= b.q_; }

    const mpq_class& raw() const { return q_; }

private:
    mpq_class q_;
};

inline Rational operator*(long a, const Rational& b) { return Rational(a) * b; }

} // namespace melkit
