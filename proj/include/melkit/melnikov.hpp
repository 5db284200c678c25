#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "melkit/generators.hpp"
#include "melkit/rational.hpp"
#include "melkit/reduced_expr.hpp"

namespace melkit {

// Which switching structure the perturbation respects. "Vertical" keeps
// only the x = 0 switching line effective (upper/lower piece pairs equal),
// "Horizontal" only y = eta, "Smooth" uses one polynomial everywhere.
enum class PerturbationCase { General, Vertical, Horizontal, Smooth };

std::string case_name(PerturbationCase c);
PerturbationCase case_from_name(const std::string& s);

// Degree-n piecewise polynomial perturbation: per quadrant k = 1..4 the
// fields gain eps * (f_k, g_k) with f_k = sum a[k]_{i,j} x^i y^j (i+j <= n)
// and likewise g_k with b-coefficients.
class PerturbationSpec {
public:
    PerturbationSpec(Rational eta, int n, PerturbationCase kind);

    const Rational& eta() const { return eta_; }
    int degree() const { return n_; }
    PerturbationCase kind() const { return kind_; }

    const Rational& a(int piece, int i, int j) const { return table_(f_, piece, i, j); }
    const Rational& b(int piece, int i, int j) const { return table_(g_, piece, i, j); }
    void set_a(int piece, int i, int j, Rational v) { table_(f_, piece, i, j) = std::move(v); }
    void set_b(int piece, int i, int j, Rational v) { table_(g_, piece, i, j) = std::move(v); }

    // Same coefficient tables over a different center parameter.
    PerturbationSpec with_eta(Rational eta) const {
        PerturbationSpec s = *this;
        if (eta.sign() <= 0) throw std::invalid_argument("PerturbationSpec: eta must be positive");
        s.eta_ = std::move(eta);
        return s;
    }

    // Enforces the piece equalities the case demands.
    void validate() const;

    // f_k / g_k evaluated in double precision (for simulation and oracles).
    double eval_f(int piece, double x, double y) const;
    double eval_g(int piece, double x, double y) const;

    bool all_zero() const;

private:
    using Table = std::array<std::map<std::pair<int, int>, Rational>, 4>;
    const Rational& table_(const Table& t, int piece, int i, int j) const;
    Rational& table_(Table& t, int piece, int i, int j);
    double eval_table(const Table& t, int piece, double x, double y) const;

    Rational eta_;
    int n_;
    PerturbationCase kind_;
    Table f_, g_;
};

// First-order Melnikov function of the perturbed system over the
// generator basis matching the case: the four-quadrant path uses the
// I/J generators plus the boundary tail, the vertical path the U
// generators (tail-free), the horizontal path the V generators plus the
// surviving even-power boundary tail.
ReducedExpr assemble(const PerturbationSpec& spec);

// Full Melnikov value at h (open annulus, h != 0).
double eval_M(const ReducedExpr& expr, const GeneratorConstants& k, double h);

// Numerator h^p M(h); same zeros on the annulus, stable near h -> 0.
double eval_M_numerator(const ReducedExpr& expr, const GeneratorConstants& k, double h);

int theoretical_bound(int n, PerturbationCase c);

struct ScanParams {
    int samples = 10000;
    double refine_tol = 1e-12;
    double endpoint_margin = 1e-9; // relative to the annulus width
};

struct ZeroBracket {
    double lo = 0.0;
    double hi = 0.0;
    double h = 0.0; // refined root
};

struct ZeroReport {
    std::vector<ZeroBracket> zeros;
    int count = 0;
    int bound = 0;
    bool within_bound = true;
    ScanParams scan;
    std::vector<std::pair<double, double>> samples; // (h, M numerator) trace
};

struct IdenticallyZeroError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Counts sign changes of M on the open annulus with a grid refined near
// both endpoints, bisecting each bracket. Throws IdenticallyZeroError when
// every sample magnitude is below 1e-13.
ZeroReport count_zeros(const ReducedExpr& expr, const GeneratorConstants& k,
                       const ScanParams& scan, int n, PerturbationCase c);

struct DegreeCheck {
    std::string name;
    int degree = -1; // -1 when absent
    int bound = 0;
    bool ok = true;
};

struct StructureReport {
    int n = 0;
    PerturbationCase kind = PerturbationCase::General;
    int denom_power = 0;
    int expected_denom_power = 0;
    std::vector<DegreeCheck> checks;
    bool ok = false;
};

// Verifies the assembled expression against the degree table of its case:
// coefficient degrees, tail degrees, admissible generators, denominator.
StructureReport structure_check(const ReducedExpr& expr, int n, PerturbationCase c,
                                const Rational& eta);

} // namespace melkit
