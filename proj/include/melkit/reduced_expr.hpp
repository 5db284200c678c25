#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "melkit/poly.hpp"
#include "melkit/rational.hpp"
#include "melkit/tail.hpp"

namespace melkit {

// Basis integrals every arc integral reduces to. I* live on the upper-right
// arc, J* on the lower-right arc, U* on the right half (x > 0), V*/Vt* on
// the upper and lower halves (y >< eta).
enum class Gen {
    I01, I20, I10, I11,
    J01, J20, J10, J11,
    U01, U20, U10, U11,
    V10, V11, Vt10, Vt11,
};

inline constexpr std::array<Gen, 16> all_generators = {
    Gen::I01, Gen::I20, Gen::I10, Gen::I11,
    Gen::J01, Gen::J20, Gen::J10, Gen::J11,
    Gen::U01, Gen::U20, Gen::U10, Gen::U11,
    Gen::V10, Gen::V11, Gen::Vt10, Gen::Vt11,
};

inline std::string_view gen_name(Gen g) {
    switch (g) {
        case Gen::I01: return "I01";
        case Gen::I20: return "I20";
        case Gen::I10: return "I10";
        case Gen::I11: return "I11";
        case Gen::J01: return "J01";
        case Gen::J20: return "J20";
        case Gen::J10: return "J10";
        case Gen::J11: return "J11";
        case Gen::U01: return "U01";
        case Gen::U20: return "U20";
        case Gen::U10: return "U10";
        case Gen::U11: return "U11";
        case Gen::V10: return "V10";
        case Gen::V11: return "V11";
        case Gen::Vt10: return "Vt10";
        case Gen::Vt11: return "Vt11";
    }
    return "?";
}

inline Gen gen_from_name(std::string_view s) {
    for (Gen g : all_generators)
        if (gen_name(g) == s) return g;
    throw std::invalid_argument("unknown generator name '" + std::string(s) + "'");
}

// An arc integral or Melnikov function written over the generator basis:
//
//     expr(h) = [ sum_g coeff_g(h) * g(h)  +  tail(h) ] / h^p
//
// with exact polynomial coefficients, an algebraic tail in powers of
// sqrt(h + 1/(2*eta)), and a single h-power denominator p >= 0.
class ReducedExpr {
public:
    ReducedExpr() = default;

    static ReducedExpr generator(Gen g) {
        ReducedExpr e;
        e.basis_.emplace(g, PolyH::constant(Rational(1)));
        return e;
    }
    static ReducedExpr from_tail(AlgebraicTail t) {
        ReducedExpr e;
        e.tail_ = std::move(t);
        return e;
    }

    bool is_zero() const { return basis_.empty() && tail_.is_zero(); }
    int denom_power() const { return denom_power_; }
    const std::map<Gen, PolyH>& basis() const { return basis_; }
    const AlgebraicTail& tail() const { return tail_; }

    const PolyH& coeff(Gen g) const {
        static const PolyH zero;
        auto it = basis_.find(g);
        return it == basis_.end() ? zero : it->second;
    }

    ReducedExpr& operator+=(const ReducedExpr& o) {
        const int p = std::max(denom_power_, o.denom_power_);
        lift_to(p);
        ReducedExpr rhs = o;
        rhs.lift_to(p);
        for (const auto& [g, c] : rhs.basis_) add_coeff(g, c);
        tail_ += rhs.tail_;
        return *this;
    }
    friend ReducedExpr operator+(ReducedExpr a, const ReducedExpr& b) { return a += b; }

    ReducedExpr operator-() const {
        ReducedExpr r;
        r.denom_power_ = denom_power_;
        for (const auto& [g, c] : basis_) r.basis_.emplace(g, -c);
        r.tail_ = -tail_;
        return r;
    }
    ReducedExpr& operator-=(const ReducedExpr& o) { return *this += -o; }
    friend ReducedExpr operator-(ReducedExpr a, const ReducedExpr& b) { return a -= b; }

    ReducedExpr scaled(const Rational& s) const {
        ReducedExpr r;
        if (s.is_zero()) return r;
        r.denom_power_ = denom_power_;
        for (const auto& [g, c] : basis_) r.basis_.emplace(g, c.scaled(s));
        r.tail_ = tail_.scaled(s);
        return r;
    }

    ReducedExpr multiplied(const PolyH& p) const {
        ReducedExpr r;
        if (p.is_zero()) return r;
        r.denom_power_ = denom_power_;
        for (const auto& [g, c] : basis_) r.basis_.emplace(g, c * p);
        r.tail_ = tail_.multiplied(p);
        return r;
    }

    ReducedExpr& divide_by_h() {
        ++denom_power_;
        return *this;
    }

    void add_tail_term(int m, const PolyH& coeff) {
        // Respect the current denominator: caller supplies numerator terms.
        tail_.add_term(m, coeff);
    }

    // Declares the denominator of an expression assembled from raw
    // numerator parts (deserialization); the current power must be 0.
    void attach_denominator(int p) {
        if (denom_power_ != 0)
            throw std::logic_error("ReducedExpr: denominator already attached");
        if (p < 0) throw std::invalid_argument("ReducedExpr: negative denominator power");
        denom_power_ = p;
    }

    // Rewrites with denominator h^p (p >= current normalized power).
    void lift_to(int p) {
        if (p < denom_power_)
            throw std::invalid_argument("ReducedExpr: cannot lower denominator by lifting");
        const int k = p - denom_power_;
        if (k == 0) return;
        for (auto& [g, c] : basis_) c = c.shifted_up(k);
        AlgebraicTail lifted;
        const PolyH hk = PolyH::monomial(Rational(1), k);
        lifted = tail_.multiplied(hk);
        tail_ = std::move(lifted);
        denom_power_ = p;
    }

    // Cancels common h factors from the numerator. Divisibility of the tail
    // is decided on the split (phi, psi) representation so cancellations
    // across half-power indices are not missed.
    void normalize(const Rational& eta) {
        while (denom_power_ > 0) {
            bool coeffs_ok = true;
            for (const auto& [g, c] : basis_)
                if (!c.divisible_by_h()) { coeffs_ok = false; break; }
            if (!coeffs_ok) return;

            bool termwise = true;
            for (const auto& [m, c] : tail_.terms())
                if (!c.divisible_by_h()) { termwise = false; break; }

            if (termwise) {
                for (auto& [g, c] : basis_) c = c.divided_by_h();
                AlgebraicTail t;
                for (const auto& [m, c] : tail_.terms()) t.add_term(m, c.divided_by_h());
                tail_ = std::move(t);
                --denom_power_;
                continue;
            }

            auto [phi, psi] = tail_.split(eta);
            if (!phi.divisible_by_h() || !psi.divisible_by_h()) return;
            for (auto& [g, c] : basis_) c = c.divided_by_h();
            AlgebraicTail t;
            t.add_term(0, phi.divided_by_h());
            t.add_term(1, psi.divided_by_h());
            tail_ = std::move(t);
            --denom_power_;
        }
        prune();
    }

    void prune() {
        for (auto it = basis_.begin(); it != basis_.end();)
            it = it->second.is_zero() ? basis_.erase(it) : std::next(it);
    }

    // Equality as functions: same denominator after normalization, same
    // basis coefficients and the same tail once half powers are expanded.
    bool equivalent(const ReducedExpr& o, const Rational& eta) const {
        ReducedExpr a = *this, b = o;
        a.normalize(eta);
        b.normalize(eta);
        a.prune();
        b.prune();
        if (a.denom_power_ != b.denom_power_) return false;
        if (a.basis_ != b.basis_) return false;
        return a.tail_.split(eta) == b.tail_.split(eta);
    }

    // Evaluates with generator values supplied by the caller (closed forms,
    // quadrature, ...). h = 0 is outside the domain whenever p > 0.
    double eval(double h, const Rational& eta,
                const std::function<double(Gen)>& gen_value) const {
        double num = tail_.is_zero() ? 0.0 : tail_.eval(h, eta);
        for (const auto& [g, c] : basis_) num += c.eval(h) * gen_value(g);
        if (denom_power_ == 0) return num;
        if (h == 0.0) throw std::domain_error("ReducedExpr: pole at h = 0");
        return num / std::pow(h, denom_power_);
    }

    // Numerator only (the h^p * expr form); shares the zero set with the
    // full expression on h < 0 and stays well conditioned near h -> 0.
    double eval_numerator(double h, const Rational& eta,
                          const std::function<double(Gen)>& gen_value) const {
        double num = tail_.is_zero() ? 0.0 : tail_.eval(h, eta);
        for (const auto& [g, c] : basis_) num += c.eval(h) * gen_value(g);
        return num;
    }

private:
    void add_coeff(Gen g, const PolyH& c) {
        if (c.is_zero()) return;
        auto it = basis_.find(g);
        if (it == basis_.end()) basis_.emplace(g, c);
        else {
            it->second += c;
            if (it->second.is_zero()) basis_.erase(it);
        }
    }

    std::map<Gen, PolyH> basis_;
    AlgebraicTail tail_;
    int denom_power_ = 0;
};

} // namespace melkit
