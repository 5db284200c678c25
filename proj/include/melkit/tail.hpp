#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

#include "melkit/poly.hpp"
#include "melkit/rational.hpp"

namespace melkit {

// Finite sum  sum_m  c_m(h) * (h + 1/(2*eta))^(m/2)  with polynomial
// coefficients c_m and non-negative half-power indices m. Defined for
// h >= -1/(2*eta). Zero coefficients are never stored.
class AlgebraicTail {
public:
    AlgebraicTail() = default;

    bool is_zero() const { return terms_.empty(); }
    const std::map<int, PolyH>& terms() const { return terms_; }

    void add_term(int m, const PolyH& coeff) {
        if (m < 0) throw std::invalid_argument("AlgebraicTail: negative half-power index");
        if (coeff.is_zero()) return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_.emplace(m, coeff);
        } else {
            it->second += coeff;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    AlgebraicTail& operator+=(const AlgebraicTail& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    friend AlgebraicTail operator+(AlgebraicTail a, const AlgebraicTail& b) { return a += b; }

    AlgebraicTail operator-() const {
        AlgebraicTail r;
        for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
        return r;
    }

    AlgebraicTail scaled(const Rational& s) const {
        AlgebraicTail r;
        if (s.is_zero()) return r;
        for (const auto& [m, c] : terms_) r.terms_.emplace(m, c.scaled(s));
        return r;
    }

    AlgebraicTail multiplied(const PolyH& p) const {
        AlgebraicTail r;
        if (p.is_zero()) return r;
        for (const auto& [m, c] : terms_) r.add_term(m, c * p);
        return r;
    }

    // Splits into phi + sqrt(h + 1/(2*eta)) * psi with phi, psi exact
    // polynomials in h: even m expands binomially, odd m contributes
    // (h+c)^((m-1)/2) to psi.
    std::pair<PolyH, PolyH> split(const Rational& eta) const {
        PolyH even_part, odd_part;
        for (const auto& [m, c] : terms_) {
            if (m % 2 == 0) even_part += c * half_center_power(eta, m / 2);
            else odd_part += c * half_center_power(eta, (m - 1) / 2);
        }
        return {even_part, odd_part};
    }

    double eval(double h, const Rational& eta) const {
        if (eta.sign() <= 0) throw std::domain_error("AlgebraicTail: eta must be positive");
        const double base = h + 1.0 / (2.0 * eta.to_double());
        if (base < 0.0) {
            // Tolerate rounding right at the annulus center.
            if (base > -1e-15) return eval_at_base(h, 0.0);
            throw std::domain_error("AlgebraicTail: h below -1/(2*eta)");
        }
        return eval_at_base(h, base);
    }

    friend bool operator==(const AlgebraicTail& a, const AlgebraicTail& b) {
        return a.terms_ == b.terms_;
    }
    friend bool operator!=(const AlgebraicTail& a, const AlgebraicTail& b) { return !(a == b); }

private:
    double eval_at_base(double h, double base) const {
        const double root = std::sqrt(base);
        double acc = 0.0;
        for (const auto& [m, c] : terms_) {
            double powv = 1.0;
            // (h+c)^(m/2) = root^m; root^0 == 1 even when the base vanishes.
            for (int k = 0; k < m; ++k) powv *= root;
            acc += c.eval(h) * powv;
        }
        return acc;
    }

    std::map<int, PolyH> terms_;
};

inline double tail_eval(const AlgebraicTail& t, double h, const Rational& eta) {
    return t.eval(h, eta);
}

} // namespace melkit
