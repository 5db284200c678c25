#pragma once

#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "melkit/rational.hpp"

namespace melkit {

// Dense univariate polynomial in the energy level h, exact rational
// coefficients stored lowest power first. Canonical form has no trailing
// zero coefficients; the zero polynomial is the empty list (degree -1).
class PolyH {
public:
    PolyH() = default;
    explicit PolyH(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }
    PolyH(std::initializer_list<Rational> coeffs) : c_(coeffs) { trim(); }

    static PolyH constant(Rational v) {
        PolyH p;
        if (!v.is_zero()) p.c_.push_back(std::move(v));
        return p;
    }
    // c * h^k
    static PolyH monomial(Rational c, int k) {
        PolyH p;
        if (c.is_zero()) return p;
        p.c_.assign(static_cast<size_t>(k) + 1, Rational(0));
        p.c_.back() = std::move(c);
        return p;
    }

    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }

    const Rational& coeff(int k) const {
        static const Rational zero(0);
        if (k < 0 || k >= static_cast<int>(c_.size())) return zero;
        return c_[static_cast<size_t>(k)];
    }
    const std::vector<Rational>& coeffs() const { return c_; }

    PolyH operator-() const {
        PolyH r = *this;
        for (auto& c : r.c_) c = -c;
        return r;
    }

    PolyH& operator+=(const PolyH& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Rational(0));
        for (size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
        trim();
        return *this;
    }
    PolyH& operator-=(const PolyH& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Rational(0));
        for (size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
        trim();
        return *this;
    }

    friend PolyH operator+(PolyH a, const PolyH& b) { return a += b; }
    friend PolyH operator-(PolyH a, const PolyH& b) { return a -= b; }

    friend PolyH operator*(const PolyH& a, const PolyH& b) {
        if (a.is_zero() || b.is_zero()) return PolyH();
        PolyH r;
        r.c_.assign(a.c_.size() + b.c_.size() - 1, Rational(0));
        for (size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i].is_zero()) continue;
            for (size_t j = 0; j < b.c_.size(); ++j)
                r.c_[i + j] += a.c_[i] * b.c_[j];
        }
        r.trim();
        return r;
    }

    PolyH& operator*=(const PolyH& o) { return *this = *this * o; }

    PolyH scaled(const Rational& s) const {
        if (s.is_zero()) return PolyH();
        PolyH r = *this;
        for (auto& c : r.c_) c *= s;
        return r;
    }

    // Multiply by h^k.
    PolyH shifted_up(int k) const {
        if (is_zero() || k == 0) return *this;
        PolyH r;
        r.c_.assign(c_.size() + static_cast<size_t>(k), Rational(0));
        for (size_t i = 0; i < c_.size(); ++i) r.c_[i + static_cast<size_t>(k)] = c_[i];
        return r;
    }

    bool divisible_by_h() const { return is_zero() || c_.front().is_zero(); }

    PolyH divided_by_h() const {
        if (is_zero()) return PolyH();
        if (!c_.front().is_zero())
            throw std::domain_error("PolyH: not divisible by h");
        PolyH r;
        r.c_.assign(c_.begin() + 1, c_.end());
        r.trim();
        return r;
    }

    // Horner evaluation in double precision.
    double eval(double h) const {
        double acc = 0.0;
        for (size_t k = c_.size(); k-- > 0;) acc = acc * h + c_[k].to_double();
        return acc;
    }

    Rational eval_exact(const Rational& h) const {
        Rational acc(0);
        for (size_t k = c_.size(); k-- > 0;) acc = acc * h + c_[k];
        return acc;
    }

    friend bool operator==(const PolyH& a, const PolyH& b) { return a.c_ == b.c_; }
    friend bool operator!=(const PolyH& a, const PolyH& b) { return !(a == b); }

    std::string str() const {
        if (is_zero()) return "0";
        std::string out;
        for (int k = degree(); k >= 0; --k) {
            const Rational& c = coeff(k);
            if (c.is_zero()) continue;
            if (!out.empty()) out += c.sign() > 0 ? " + " : " - ";
            else if (c.sign() < 0) out += "-";
            std::string mag = c.abs().str();
            if (k == 0) out += mag;
            else {
                if (mag != "1") out += mag + "*";
                out += (k == 1) ? "h" : "h^" + std::to_string(k);
            }
        }
        return out;
    }

private:
    void trim() {
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    }

    std::vector<Rational> c_;
};

enum class PolyOp { Add, Sub, Mul };

inline PolyH poly_arith(const PolyH& a, const PolyH& b, PolyOp op) {
    switch (op) {
        case PolyOp::Add: return a + b;
        case PolyOp::Sub: return a - b;
        case PolyOp::Mul: return a * b;
    }
    throw std::invalid_argument("poly_arith: bad op");
}

inline double poly_eval(const PolyH& p, double h) { return p.eval(h); }

// (h + 1/(2*eta))^k expanded exactly as a polynomial in h.
inline PolyH half_center_power(const Rational& eta, int k) {
    if (eta.sign() <= 0) throw std::domain_error("half_center_power: eta must be positive");
    const Rational c = (Rational(2) * eta).inverse();
    PolyH acc = PolyH::constant(Rational(1));
    const PolyH base({c, Rational(1)});
    for (int i = 0; i < k; ++i) acc *= base;
    return acc;
}

} // namespace melkit
