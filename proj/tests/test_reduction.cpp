#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "melkit/quadrature.hpp"
#include "melkit/reduction.hpp"

using namespace melkit;

namespace {

ReducedExpr tail_expr(int m, const Rational& coeff) {
    ReducedExpr e;
    e.add_tail_term(m, PolyH::constant(coeff));
    return e;
}

struct SideCtx {
    Reducer red;
    Rational sgn; // boundary orientation of the closing segment
    Gen g01, g20, g10, g11;
};

SideCtx make_side(int side, const Rational& eta) {
    if (side == 1)
        return {Reducer(ArcFamily::UpperRight, eta), Rational(1), Gen::I01, Gen::I20, Gen::I10,
                Gen::I11};
    return {Reducer(ArcFamily::LowerRight, eta), Rational(-1), Gen::J01, Gen::J20, Gen::J10,
            Gen::J11};
}

double eval_vs_quadrature(const ReducedExpr& e, int side, int i, int j, double h,
                          const Rational& eta) {
    const double eta_d = eta.to_double();
    auto basis = quadrature_basis(h, eta_d, 1e-12);
    const double via = e.eval(h, eta, basis);
    const double direct = arc_integral_dy(side, i, j, h, eta_d, 1e-12);
    return std::abs(via - direct) / std::max({std::abs(direct), std::abs(via), 1e-12});
}

} // namespace

TEST_CASE("generators reduce to themselves") {
    const Rational eta(1);
    Reducer red(ArcFamily::UpperRight, eta);
    const ReducedExpr e = red.reduce(0, 1);
    CHECK(e.denom_power() == 0);
    CHECK(e.tail().is_zero());
    CHECK(e.coeff(Gen::I01) == PolyH::constant(Rational(1)));
    CHECK(e.basis().size() == 1);
}

TEST_CASE("bottom identities of the index ladder") {
    for (int side : {1, 2}) {
        for (const Rational& eta : {Rational(1, 2), Rational(1), Rational(2)}) {
            SideCtx ctx = make_side(side, eta);
            const Rational inv_eta = eta.inverse();
            const Rational c = (Rational(2) * eta).inverse();

            // T_{0,0} = eta^-1 G01 + sgn eta^-1 (h + c)
            ReducedExpr expect = ReducedExpr::generator(ctx.g01).scaled(inv_eta) +
                                 tail_expr(2, ctx.sgn * inv_eta);
            CHECK(ctx.red.reduce(0, 0).equivalent(expect, eta));

            // T_{1,-1} = eta^-1 G10 + sgn (2/3) eta^-1 (h + c)^(3/2)
            expect = ReducedExpr::generator(ctx.g10).scaled(inv_eta) +
                     tail_expr(3, ctx.sgn * Rational(2, 3) * inv_eta);
            CHECK(ctx.red.reduce(1, -1).equivalent(expect, eta));

            // Eliminated pair: T_{2,-1} = (1/3)(2h + 1/eta) G01, orientation-free.
            expect = ReducedExpr::generator(ctx.g01)
                         .multiplied(PolyH({Rational(1, 3) * inv_eta, Rational(2, 3)}));
            CHECK(ctx.red.reduce(2, -1).equivalent(expect, eta));

            // And it equals eta T_{0,-1} - T_{0,0} - sgn eta^-1 (h + c).
            ReducedExpr rhs = ctx.red.reduce(0, -1).scaled(eta) - ctx.red.reduce(0, 0) -
                              tail_expr(2, ctx.sgn * inv_eta);
            CHECK(ctx.red.reduce(2, -1).equivalent(rhs, eta));

            // Level identity at (0,1): h G01 = T_{2,-1} - T_{0,0} + (eta/2) T_{0,-1}.
            ReducedExpr lhs =
                ReducedExpr::generator(ctx.g01).multiplied(PolyH::monomial(Rational(1), 1));
            rhs = ctx.red.reduce(2, -1) - ctx.red.reduce(0, 0) +
                  ctx.red.reduce(0, -1).scaled(eta * Rational(1, 2));
            CHECK(lhs.equivalent(rhs, eta));
        }
    }
}

TEST_CASE("level and ladder identities for total degree three") {
    for (int side : {1, 2}) {
        for (const Rational& eta : {Rational(1, 2), Rational(1), Rational(2)}) {
            SideCtx ctx = make_side(side, eta);
            auto gen = [&](Gen g) { return ReducedExpr::generator(g); };
            const PolyH h_poly = PolyH::monomial(Rational(1), 1);

            // T_{0,2} = (T20 - T01 + (eta/2) T00) / h
            ReducedExpr rhs = gen(ctx.g20) - gen(ctx.g01) +
                              ctx.red.reduce(0, 0).scaled(eta * Rational(1, 2));
            rhs.divide_by_h();
            CHECK(ctx.red.reduce(0, 2).equivalent(rhs, eta));

            // T_{3,-1} = h T11 + T10 - (eta/2) T_{1,-1}
            rhs = gen(ctx.g11).multiplied(h_poly) + gen(ctx.g10) -
                  ctx.red.reduce(1, -1).scaled(eta * Rational(1, 2));
            CHECK(ctx.red.reduce(3, -1).equivalent(rhs, eta));

            // T_{0,3} = (T21 - T02 + (eta/2) T01) / h
            rhs = ctx.red.reduce(2, 1) - ctx.red.reduce(0, 2) +
                  gen(ctx.g01).scaled(eta * Rational(1, 2));
            rhs.divide_by_h();
            CHECK(ctx.red.reduce(0, 3).equivalent(rhs, eta));

            // T_{1,2} = (T30 - T11 + (eta/2) T10) / h
            rhs = ctx.red.reduce(3, 0) - gen(ctx.g11) + gen(ctx.g10).scaled(eta * Rational(1, 2));
            rhs.divide_by_h();
            CHECK(ctx.red.reduce(1, 2).equivalent(rhs, eta));

            // T_{2,1} = T02 - eta T01 + sgn eta (h + c)
            rhs = ctx.red.reduce(0, 2) - gen(ctx.g01).scaled(eta) + tail_expr(2, ctx.sgn * eta);
            CHECK(ctx.red.reduce(2, 1).equivalent(rhs, eta));

            // T_{3,0} = (3/2) T11 - (3/2) eta T10 + sgn eta (h + c)^(3/2)
            rhs = gen(ctx.g11).scaled(Rational(3, 2)) -
                  gen(ctx.g10).scaled(Rational(3, 2) * eta) + tail_expr(3, ctx.sgn * eta);
            CHECK(ctx.red.reduce(3, 0).equivalent(rhs, eta));

            // T_{4,-1} = 2 T20 - 2 eta T_{2,-1} + sgn eta (h + c)^2. The
            // quadratic boundary power follows from the ladder recurrence
            // and is confirmed by the quadrature oracle below.
            rhs = gen(ctx.g20).scaled(Rational(2)) -
                  ctx.red.reduce(2, -1).scaled(Rational(2) * eta) + tail_expr(4, ctx.sgn * eta);
            CHECK(ctx.red.reduce(4, -1).equivalent(rhs, eta));
        }
    }
}

TEST_CASE("boundary power of the (4,-1) reduction is quadratic") {
    // Distinguishes sgn*eta*(h+c)^2 from the linear alternative sgn*(h+c).
    const Rational eta(1);
    Reducer red(ArcFamily::UpperRight, eta);
    const double h = -0.25;
    const double rel = eval_vs_quadrature(red.reduce(4, -1), 1, 4, -1, h, eta);
    CHECK(rel < 1e-9);

    ReducedExpr linear_variant = ReducedExpr::generator(Gen::I20).scaled(Rational(2)) -
                                 red.reduce(2, -1).scaled(Rational(2)) +
                                 tail_expr(2, Rational(1));
    auto basis = quadrature_basis(h, 1.0, 1e-12);
    const double direct = arc_integral_dy(1, 4, -1, h, 1.0, 1e-12);
    CHECK(std::abs(linear_variant.eval(h, eta, basis) - direct) > 0.1);
}

TEST_CASE("reduction matches quadrature across the index sweep") {
    const Rational eta(1);
    const double h = -0.25;
    for (int side : {1, 2, 3, 4}) {
        for (int i = 0; i <= 5; ++i) {
            for (int j = -1; i + j <= 5; ++j) {
                const ReducedExpr e = reduce_integral(IntegralId{side, i, j}, eta);
                INFO("side ", side, " i ", i, " j ", j);
                CHECK(eval_vs_quadrature(e, side, i, j, h, eta) < 1e-8);
            }
        }
    }
}

TEST_CASE("high-order reduction example from the index set") {
    const Rational eta(1);
    Reducer red(ArcFamily::UpperRight, eta);
    const ReducedExpr e = red.reduce(0, 5);
    CHECK(eval_vs_quadrature(e, 1, 0, 5, -0.25, eta) < 1e-8);
}

TEST_CASE("deep recurrence chains stay exact") {
    // Coefficient denominators blow far past 64 bits on these chains; the
    // reduced forms must still hit the quadrature oracle.
    const Rational eta(1, 2);
    Reducer red(ArcFamily::UpperRight, eta);
    for (auto [i, j] : {std::pair{0, 12}, std::pair{12, -1}, std::pair{7, 5}}) {
        const ReducedExpr e = red.reduce(i, j);
        INFO("i ", i, " j ", j);
        CHECK(eval_vs_quadrature(e, 1, i, j, -0.6, eta) < 1e-7);
    }
}

TEST_CASE("index parity separates the generator pairs") {
    const Rational eta(1, 2);
    Reducer red(ArcFamily::UpperRight, eta);
    for (int i = 0; i <= 6; ++i) {
        for (int j = -1; i + j <= 6; ++j) {
            const ReducedExpr e = red.reduce(i, j);
            const bool even = i % 2 == 0;
            if (even) {
                CHECK(e.coeff(Gen::I10).is_zero());
                CHECK(e.coeff(Gen::I11).is_zero());
                for (const auto& [m, cp] : e.tail().terms()) CHECK(m % 2 == 0);
            } else {
                CHECK(e.coeff(Gen::I01).is_zero());
                CHECK(e.coeff(Gen::I20).is_zero());
                for (const auto& [m, cp] : e.tail().terms()) CHECK(m % 2 == 1);
            }
        }
    }
}

TEST_CASE("degree bounds of the reduced structure") {
    for (const Rational& eta : {Rational(1), Rational(2)}) {
        Reducer red(ArcFamily::UpperRight, eta);
        for (int n = 3; n <= 10; ++n) {
            for (int i = 0; i <= n + 1; ++i) {
                const int j = n - i;
                if (j < -1) continue;
                ReducedExpr e = red.reduce(i, j);
                e.normalize(eta);
                CHECK(e.denom_power() <= n - 2);
                const int lift = (n - 2) - e.denom_power();
                auto deg = [&](const PolyH& p) { return p.is_zero() ? -1 : p.degree() + lift; };
                const int sg = (n % 2 == 0) ? 1 : -1;
                auto [phi, psi] = e.tail().split(eta);
                if (i % 2 == 0) {
                    CHECK(deg(e.coeff(Gen::I01)) <= n - (3 + sg) / 2);
                    CHECK(deg(e.coeff(Gen::I20)) <= n - 2);
                    const int phi_bound = (n % 2 == 0) ? (3 * n) / 2 - 2 : (3 * n - 3) / 2;
                    CHECK(deg(phi) <= phi_bound);
                    CHECK(psi.is_zero());
                } else {
                    CHECK(deg(e.coeff(Gen::I10)) <= n - 2);
                    CHECK(deg(e.coeff(Gen::I11)) <= n - (3 - sg) / 2);
                    const int psi_bound = (n % 2 == 0) ? (3 * n) / 2 - 2 : (3 * n - 5) / 2;
                    // Odd reductions store sqrt(h+c) phi-bar: psi here.
                    CHECK(deg(psi) <= psi_bound + 1); // bar-phi table of the single-arc case
                    CHECK(phi.is_zero());
                }
            }
        }
    }
}

TEST_CASE("rejects indices outside the ladder") {
    const Rational eta(1);
    Reducer red(ArcFamily::UpperRight, eta);
    CHECK_THROWS_AS(red.reduce(0, -2), std::invalid_argument);
    CHECK_THROWS_AS(red.reduce(-1, 0), std::invalid_argument);
    CHECK_THROWS_AS(reduce_integral(IntegralId{5, 0, 0}, eta), std::invalid_argument);
    CHECK_THROWS_AS(red.convert_dx(0, -4), std::invalid_argument);
}

TEST_CASE("memoized reduction is deterministic") {
    const Rational eta(1, 2);
    Reducer red(ArcFamily::UpperRight, eta);
    const ReducedExpr first = red.reduce(4, 3);
    const ReducedExpr second = red.reduce(4, 3);
    CHECK(first.equivalent(second, eta));
    Reducer fresh(ArcFamily::UpperRight, eta);
    CHECK(fresh.reduce(4, 3).equivalent(first, eta));
}

TEST_CASE("mirror rule for the left arcs") {
    const Rational eta(1);
    // Odd x-power: same sign as the right-side integral.
    SymmetryImage s = apply_symmetry(IntegralId{4, 1, 2});
    CHECK(s.image.side == 1);
    CHECK(s.factor == Rational(1));
    // Even x-power: sign flips.
    s = apply_symmetry(IntegralId{4, 2, 1});
    CHECK(s.factor == Rational(-1));

    const ReducedExpr e = reduce_integral(IntegralId{4, 2, 1}, eta);
    const ReducedExpr base = reduce_integral(IntegralId{1, 2, 1}, eta);
    CHECK(e.equivalent(base.scaled(Rational(-1)), eta));

    // Numerical cross-check on side 3 vs side 2 for (0,1).
    const double h = -0.25;
    const double left = arc_integral_dy(3, 0, 1, h, 1.0, 1e-12);
    const double right = arc_integral_dy(2, 0, 1, h, 1.0, 1e-12);
    CHECK(left == doctest::Approx(-right).epsilon(1e-10));
    CHECK(left == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-9));
}

TEST_CASE("dx conversion composes the ladder and the boundary") {
    const Rational eta(1);
    Reducer red(ArcFamily::UpperRight, eta);

    // x^0 y^-3 dx over the upper-right arc:
    // 3 T_{1,-1} + (h+c)^(1/2) = (3/eta) G10 + 2/eta (h+c)^(3/2) + 1/eta^2 (h+c)^(1/2)
    ReducedExpr e = red.convert_dx(0, -3);
    ReducedExpr expect = ReducedExpr::generator(Gen::I10).scaled(Rational(3)) +
                         tail_expr(3, Rational(2)) + tail_expr(1, Rational(1));
    CHECK(e.equivalent(expect, eta));

    // Exponent zero keeps only the boundary displacement.
    e = red.convert_dx(2, 0);
    CHECK(e.basis().empty());
    expect = tail_expr(3, Rational(1, 3));
    CHECK(e.equivalent(expect, eta));

    // Quadrature cross-check of the dx conversion on all sides, over the
    // full index range a degree-6 assembly routes through.
    const double h = -0.25;
    auto basis = quadrature_basis(h, 1.0, 1e-12);
    for (int side = 1; side <= 4; ++side) {
        for (int i = 0; i <= 6; ++i) {
            for (int e2 = -3; e2 <= 3; ++e2) {
                const ReducedExpr conv = convert_dx(i, e2, side, eta);
                const double via = conv.eval(h, eta, basis);
                const double direct = arc_integral_dx(side, i, e2, h, 1.0, 1e-12);
                INFO("side ", side, " i ", i, " exponent ", e2);
                CHECK(std::abs(via - direct) <
                      1e-8 * std::max({1.0, std::abs(via), std::abs(direct)}));
            }
        }
    }
}

TEST_CASE("half-contour reductions") {
    const Rational eta(1);
    Reducer ru(ArcFamily::RightHalf, eta);

    // Right-half ladder carries no boundary terms at all.
    for (int i = 0; i <= 5; ++i)
        for (int j = -1; i + j <= 5; ++j)
            CHECK(ru.reduce(i, j).tail().is_zero());

    // Upper-half contour kills even x-powers entirely.
    Reducer rv(ArcFamily::UpperHalf, eta);
    CHECK(rv.reduce(0, 1).is_zero());
    CHECK(rv.reduce(2, 2).is_zero());
    CHECK_FALSE(rv.reduce(1, 0).is_zero());

    // Odd upper-half reductions double the single-arc tail.
    const ReducedExpr v = rv.reduce(1, -1);
    ReducedExpr expect = ReducedExpr::generator(Gen::V10) + tail_expr(3, Rational(4, 3));
    CHECK(v.equivalent(expect, eta));

    // Numerical check against summed-arcs quadrature.
    const double h = -0.3;
    auto basis = quadrature_basis(h, 1.0, 1e-12);
    const double via = v.eval(h, eta, basis);
    const double direct =
        arc_integral_dy(1, 1, -1, h, 1.0, 1e-12) + arc_integral_dy(4, 1, -1, h, 1.0, 1e-12);
    CHECK(via == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("base identity map covers both right arcs") {
    const Rational eta(2);
    for (int side : {1, 2}) {
        const auto ids = base_identities(side, eta);
        CHECK(ids.size() == 10);
        const double h = -0.1;
        auto basis = quadrature_basis(h, 2.0, 1e-12);
        for (const auto& [ij, expr] : ids) {
            const double direct = arc_integral_dy(side, ij.first, ij.second, h, 2.0, 1e-12);
            const double via = expr.eval(h, eta, basis);
            INFO("side ", side, " i ", ij.first, " j ", ij.second);
            CHECK(std::abs(via - direct) <
                  1e-8 * std::max({1.0, std::abs(via), std::abs(direct)}));
        }
    }
}
