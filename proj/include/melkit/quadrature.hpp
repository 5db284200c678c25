#pragma once

#include <functional>
#include <stdexcept>

#include "melkit/reduced_expr.hpp"

namespace melkit {

// Integrand evaluated at x with its exactly-transformed distances to the
// interval endpoints, da = x - a and db = b - x. The distances stay
// accurate down to ~1e-290 so endpoint singularities and square-root
// vanishing can be computed without cancellation.
using Integrand = std::function<double(double x, double da, double db)>;

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int levels = 0;
    bool converged = false;
};

// Double-exponential (tanh-sinh) quadrature on (a, b). Handles integrable
// endpoint singularities; tol mixes absolute and relative error.
QuadResult tanh_sinh(const Integrand& f, double a, double b, double tol, int max_level = 12);

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Corner points of the closed level oval H = h: A and C on x = 0 (above
// and below the center), B and D on y = eta (right and left).
struct OvalGeometry {
    double h = 0.0;
    double eta = 1.0;
    double y_a = 0.0; // upper y-axis crossing
    double y_c = 0.0; // lower y-axis crossing
    double x_b = 0.0; // right y = eta crossing (left one is -x_b)

    double hamiltonian_residual() const;
};

double hamiltonian(double x, double y, double eta);

// Requires -1/(2 eta) <= h < 0. At the annulus center all corners collapse
// onto (0, eta).
OvalGeometry oval_endpoints(double h, double eta);

// Oriented arc integral of x^i y^(j-3) dy over side 1..4 (clockwise flow).
double arc_integral_dy(int side, int i, int j, double h, double eta, double tol = 1e-10);

// Oriented arc integral of x^i y^exponent dx; the dx form has an
// inverse-square-root singularity at the corner on the y axis.
double arc_integral_dx(int side, int i, int exponent, double h, double eta, double tol = 1e-10);

// Generator value by direct quadrature (sides summed for U, V, Vt).
double generator_quadrature(Gen g, double h, double eta, double tol = 1e-10);

// Returns a memoizing (h -> generator values) evaluator for one eta; used
// to feed reduced expressions with oracle-supplied generator values.
std::function<double(Gen)> quadrature_basis(double h, double eta, double tol = 1e-10);

// The eight first-order systems satisfied by the generator pairs.
enum class PfSystem { IEven, IOdd, JEven, JOdd, UEven, UOdd, V, Vt };

struct PfResidual {
    double first = 0.0;  // *01 or *10 equation
    double second = 0.0; // *20 or *11 equation
};

// Residuals of the named system with derivatives replaced by central
// differences of quadrature values at h +- step.
PfResidual pf_residual(PfSystem sys, double h, double eta, double step = 1e-5,
                       double quad_tol = 1e-12);

const char* pf_system_name(PfSystem sys);

} // namespace melkit
