#include "melkit/reduction.hpp"

namespace melkit {

namespace {

void check_id(int side, int i, int j) {
    if (side < 1 || side > 4) throw std::invalid_argument("integral side must be 1..4");
    if (i < 0) throw std::invalid_argument("integral x-power must be >= 0");
    if (j < -1) throw std::invalid_argument("integral index j must be >= -1");
}

} // namespace

Reducer::Reducer(ArcFamily family, Rational eta)
    : family_(family), eta_(std::move(eta)) {
    if (eta_.sign() <= 0) throw std::domain_error("Reducer: eta must be positive");
    inv_eta_ = eta_.inverse();
}

ReducedExpr Reducer::generator_unit(int which) const {
    static constexpr Gen table[5][4] = {
        {Gen::I01, Gen::I20, Gen::I10, Gen::I11},
        {Gen::J01, Gen::J20, Gen::J10, Gen::J11},
        {Gen::U01, Gen::U20, Gen::U10, Gen::U11},
        {Gen::V10, Gen::V11, Gen::V10, Gen::V11},   // even slots unused
        {Gen::Vt10, Gen::Vt11, Gen::Vt10, Gen::Vt11},
    };
    const int row = static_cast<int>(family_);
    if ((family_ == ArcFamily::UpperHalf || family_ == ArcFamily::LowerHalf) && which < 2)
        throw std::logic_error("Reducer: even generators unreachable on half contours");
    return ReducedExpr::generator(table[row][which]);
}

// Sign carried by the closing-segment integral along y = eta. The half
// contours only meet the segment with even integrand powers; odd powers
// integrate to zero across the symmetric segment.
Rational Reducer::boundary_sign(int power) const {
    switch (family_) {
        case ArcFamily::UpperRight: return Rational(1);
        case ArcFamily::LowerRight: return Rational(-1);
        case ArcFamily::RightHalf: return Rational(0);
        case ArcFamily::UpperHalf: return power % 2 == 0 ? Rational(2) : Rational(0);
        case ArcFamily::LowerHalf: return power % 2 == 0 ? Rational(-2) : Rational(0);
    }
    throw std::logic_error("Reducer: bad family");
}

ReducedExpr Reducer::boundary_tail(int m, const Rational& coeff) const {
    ReducedExpr e;
    e.add_tail_term(m, PolyH::constant(coeff));
    return e;
}

ReducedExpr Reducer::reduce(int i, int j) {
    if (i < 0) throw std::invalid_argument("Reducer: x-power must be >= 0");
    if (j < -1) throw std::invalid_argument("Reducer: index j must be >= -1");
    const auto key = std::make_pair(i, j);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    ReducedExpr e = compute(i, j);
    e.normalize(eta_);
    memo_.emplace(key, e);
    return e;
}

ReducedExpr Reducer::compute(int i, int j) {
    // Integrals with even x-power vanish on the x-symmetric half contours.
    const bool half = family_ == ArcFamily::UpperHalf || family_ == ArcFamily::LowerHalf;
    if (half && i % 2 == 0) return ReducedExpr();

    // Generators.
    if (i == 0 && j == 1) return generator_unit(0);
    if (i == 2 && j == 0) return generator_unit(1);
    if (i == 1 && j == 0) return generator_unit(2);
    if (i == 1 && j == 1) return generator_unit(3);

    // Base identities at the bottom of the index ladder. The first two come
    // from the degenerate x-power recurrence (total degree 2), the third
    // from eliminating the (0,-1) integral between that recurrence at
    // (2,-1) and the level identity at (0,1).
    if (i == 0 && j == 0) {
        // eta^-1 * G01 + sgn * eta^-1 * (h + c); segment power 1.
        ReducedExpr e = generator_unit(0).scaled(inv_eta_);
        const Rational b = boundary_sign(1);
        if (!b.is_zero()) e += boundary_tail(2, b * inv_eta_);
        return e;
    }
    if (i == 1 && j == -1) {
        // eta^-1 * G10 + sgn * (2/3) eta^-1 * (h + c)^(3/2); segment power 2.
        ReducedExpr e = generator_unit(2).scaled(inv_eta_);
        const Rational b = boundary_sign(2);
        if (!b.is_zero()) e += boundary_tail(3, b * Rational(2, 3) * inv_eta_);
        return e;
    }
    if (i == 0 && j == -1) {
        // (2/(3 eta)) (h + 2/eta) G01 + sgn * 2 eta^-2 (h + c); segment power 1.
        const Rational two_third_inv = Rational(2, 3) * inv_eta_;
        PolyH lin({Rational(2) * inv_eta_, Rational(1)}); // h + 2/eta
        ReducedExpr e = generator_unit(0).multiplied(lin.scaled(two_third_inv));
        const Rational b = boundary_sign(1);
        if (!b.is_zero()) e += boundary_tail(2, b * Rational(2) * inv_eta_ * inv_eta_);
        return e;
    }

    if (i >= 2 && i + j != 2) {
        // x-power recurrence: 2(i+j-2) T_{i,j} =
        //     i T_{i-2,j+1} - i eta T_{i-2,j} + 2 sgn eta^(i+j-2) (h+c)^(i/2)
        // The segment integrand is x^(i-1).
        const Rational denom(2 * (i + j - 2));
        const Rational inv = denom.inverse();
        ReducedExpr e = reduce(i - 2, j + 1).scaled(Rational(i) * inv);
        e += reduce(i - 2, j).scaled(-(Rational(i) * eta_ * inv));
        const Rational b = boundary_sign(i - 1);
        if (!b.is_zero())
            e += boundary_tail(i, Rational(2) * b * eta_.pow(i + j - 2) * inv);
        return e;
    }

    if (i == 3 && j == -1) {
        // Level identity at (1,1): T_{3,-1} = h T_{1,1} + T_{1,0} - (eta/2) T_{1,-1}
        ReducedExpr e = generator_unit(3).multiplied(PolyH::monomial(Rational(1), 1));
        e += generator_unit(2);
        e += reduce(1, -1).scaled(-(eta_ * Rational(1, 2)));
        return e;
    }

    if (i <= 1 && j >= 2) {
        // Level identity: h T_{i,j} = T_{i+2,j-2} - T_{i,j-1} + (eta/2) T_{i,j-2}
        ReducedExpr e = reduce(i + 2, j - 2);
        e -= reduce(i, j - 1);
        e += reduce(i, j - 2).scaled(eta_ * Rational(1, 2));
        e.divide_by_h();
        return e;
    }

    throw std::logic_error("Reducer: unhandled index pair");
}

ReducedExpr Reducer::convert_dx(int i, int exponent) {
    if (i < 0) throw std::invalid_argument("convert_dx: x-power must be >= 0");
    if (exponent < -3)
        throw std::invalid_argument("convert_dx: exponent below -3 is outside the supported range");

    // Green's formula against the closing segments:
    //   int x^i y^e dx = -e/(i+1) int x^(i+1) y^(e-1) dy - eta^e int_seg x^i dx
    // The segment term evaluates to sgn * eta^(i+e+1) (h+c)^((i+1)/2) / (i+1)
    // since the arc meets y = eta at x = +-eta sqrt(h + 1/(2 eta)).
    ReducedExpr e;
    if (exponent != 0)
        e = reduce(i + 1, exponent + 2).scaled(Rational(-exponent, i + 1));
    const Rational b = boundary_sign(i + 1);
    if (!b.is_zero())
        e += boundary_tail(i + 1, b * eta_.pow(i + exponent + 1) * Rational(1, i + 1));
    e.normalize(eta_);
    return e;
}

SymmetryImage apply_symmetry(const IntegralId& id) {
    check_id(id.side, id.i, id.j);
    if (id.side != 3 && id.side != 4)
        throw std::invalid_argument("apply_symmetry: expects side 3 or 4");
    SymmetryImage out;
    out.image = IntegralId{id.side == 4 ? 1 : 2, id.i, id.j};
    out.factor = (id.i % 2 == 0) ? Rational(-1) : Rational(1); // (-1)^(i+1)
    return out;
}

ReducedExpr reduce_integral(const IntegralId& id, const Rational& eta) {
    check_id(id.side, id.i, id.j);
    if (id.side == 1) return Reducer(ArcFamily::UpperRight, eta).reduce(id.i, id.j);
    if (id.side == 2) return Reducer(ArcFamily::LowerRight, eta).reduce(id.i, id.j);
    const SymmetryImage sym = apply_symmetry(id);
    return reduce_integral(sym.image, eta).scaled(sym.factor);
}

ReducedExpr convert_dx(int i, int exponent, int side, const Rational& eta) {
    check_id(side, i, 0);
    if (side == 1) return Reducer(ArcFamily::UpperRight, eta).convert_dx(i, exponent);
    if (side == 2) return Reducer(ArcFamily::LowerRight, eta).convert_dx(i, exponent);

    // Mirror arc: equals (-1)^i times the dx integral over side 2 (for
    // side 3) or side 1 (for side 4), x -> -x reversing both the integrand
    // sign at power i and the traversal.
    const Rational mirror = (i % 2 == 0) ? Rational(1) : Rational(-1);
    return convert_dx(i, exponent, side == 3 ? 2 : 1, eta).scaled(mirror);
}

std::map<std::pair<int, int>, ReducedExpr> base_identities(int side, const Rational& eta) {
    if (side != 1 && side != 2)
        throw std::invalid_argument("base_identities: side must be 1 or 2");
    Reducer red(side == 1 ? ArcFamily::UpperRight : ArcFamily::LowerRight, eta);
    static constexpr std::pair<int, int> ids[] = {
        {0, 0}, {1, -1}, {0, 2}, {3, -1}, {2, -1},
        {0, 3}, {1, 2}, {2, 1}, {3, 0}, {4, -1},
    };
    std::map<std::pair<int, int>, ReducedExpr> out;
    for (auto [i, j] : ids) out.emplace(std::make_pair(i, j), red.reduce(i, j));
    return out;
}

} // namespace melkit
