#pragma once

#include <map>
#include <stdexcept>

#include "melkit/rational.hpp"
#include "melkit/reduced_expr.hpp"

namespace melkit {

// One oriented piece of the level oval, or a union of two pieces sharing a
// generator basis. Sides follow the clockwise traversal: 1 upper-right
// (A->B), 2 lower-right (B->C), 3 lower-left (C->D), 4 upper-left (D->A).
struct IntegralId {
    int side = 1; // 1..4
    int i = 0;    // power of x, >= 0
    int j = 0;    // y-offset index, >= -1 (integrand x^i y^(j-3) dy)
};

enum class ArcFamily {
    UpperRight, // side 1, generators I*
    LowerRight, // side 2, generators J*
    RightHalf,  // sides 1+2, generators U*
    UpperHalf,  // sides 1+4, generators V* (even x-powers vanish)
    LowerHalf,  // sides 2+3, generators Vt* (even x-powers vanish)
};

// Reduces arc integrals of x^i y^(j-3) dy over one family to its generator
// basis, exactly. The boundary segments closing each arc against the
// switching lines enter through a family-specific sign; results are
// memoized per (i, j).
class Reducer {
public:
    Reducer(ArcFamily family, Rational eta);

    const Rational& eta() const { return eta_; }
    ArcFamily family() const { return family_; }

    // Integral of x^i y^(j-3) dy over the family's arc.
    ReducedExpr reduce(int i, int j);

    // Integral of x^i y^exponent dx over the family's arc, converted to dy
    // form plus the boundary-segment contribution. Requires exponent >= -3.
    ReducedExpr convert_dx(int i, int exponent);

private:
    ReducedExpr compute(int i, int j);
    ReducedExpr generator_unit(int which) const; // 0:*01 1:*20 2:*10 3:*11
    Rational boundary_sign(int i) const;         // sign of the segment term
    ReducedExpr boundary_tail(int m, const Rational& coeff) const;

    ArcFamily family_;
    Rational eta_;
    Rational inv_eta_;
    std::map<std::pair<int, int>, ReducedExpr> memo_;
};

// Spec-level operations over the four oval sides. Sides 3 and 4 are mapped
// onto sides 2 and 1 by the mirror rule (factor (-1)^(i+1)).
ReducedExpr reduce_integral(const IntegralId& id, const Rational& eta);

// Mirror factor and the equivalent side for a side-3/4 integral.
struct SymmetryImage {
    IntegralId image;
    Rational factor;
};
SymmetryImage apply_symmetry(const IntegralId& id);

// Integral of x^i y^exponent dx over side 1..4.
ReducedExpr convert_dx(int i, int exponent, int side, const Rational& eta);

// The small closed system of identities the reduction bottoms out on, for
// sides 1 and 2: indices (0,0), (1,-1), (0,2), (3,-1), (2,-1), (0,3),
// (1,2), (2,1), (3,0), (4,-1).
std::map<std::pair<int, int>, ReducedExpr> base_identities(int side, const Rational& eta);

} // namespace melkit
