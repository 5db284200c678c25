#pragma once

#include <functional>
#include <string>
#include <vector>

#include "melkit/rational.hpp"
#include "melkit/reduced_expr.hpp"

namespace melkit {

// Integration constants of the generator closed forms, fixed against the
// quadrature oracle for one eta. c1/d1/e1/c1_hat/d1_hat come from the
// linear generators' slope, c2/d2/e2 from requiring the log-family
// generators to vanish on the degenerate oval.
struct GeneratorConstants {
    Rational eta{1};
    double c1 = 0.0, c2 = 0.0;
    double d1 = 0.0, d2 = 0.0;
    double e1 = 0.0, e2 = 0.0;
    double c1_hat = 0.0, d1_hat = 0.0;
    std::vector<double> calibration_h;
    double residual = 0.0; // max cross-sample inconsistency and oracle mismatch
};

struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Closed-form generator value for h in [-1/(2 eta), 0); all generators
// vanish at the annulus center (limit value).
double closed_form(Gen g, const GeneratorConstants& k, double h);

using GeneratorOracle = std::function<double(Gen, double h)>;

// Calibrates the constants against an arc-integral oracle (defaults to the
// quadrature module) at the given interior samples (>= 3 required).
// Throws CalibrationError when the cross-sample inconsistency or the
// closed-form-vs-oracle residual exceeds 1e-8.
GeneratorConstants calibrate(const Rational& eta,
                             const GeneratorOracle& oracle = {},
                             std::vector<double> h_samples = {});

// Process-wide cache of calibrated constants, keyed by eta.
const GeneratorConstants& calibrated(const Rational& eta);

// One comparison row of the basis cross-check: an identity such as
// "U01 equals I01 + J01" or a printed closed-form variant, measured
// against quadrature.
struct CrossCheckRow {
    std::string name;
    double value = 0.0;      // candidate value
    double reference = 0.0;  // quadrature (authoritative)
    double abs_diff = 0.0;
    bool ok = false; // within 1e-8
};

struct BasisCrossCheck {
    double h = 0.0;
    std::vector<CrossCheckRow> rows;
    bool all_consistent = false; // true when every implemented form matches quadrature
};

// Compares the combined-contour generators against sums of single-arc
// generators and against quadrature, including the conflicting printed
// variants of U01 / U20 / U11 / Vt11; quadrature decides.
BasisCrossCheck cross_check_bases(const GeneratorConstants& k, double h);

} // namespace melkit
