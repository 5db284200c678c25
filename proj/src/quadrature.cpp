#include "melkit/quadrature.hpp"

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <vector>

namespace melkit {

namespace {

constexpr double kPiHalf = 1.5707963267948966;

// Node of the tanh-sinh transform at parameter t: position is encoded as
// the distance to the nearer endpoint so callers keep full precision there.
struct TsNode {
    double weight;   // (pi/2) cosh t / cosh^2((pi/2) sinh t)
    double offset;   // 1 - |tanh((pi/2) sinh t)|  in (0, 1]
};

TsNode ts_node(double t) {
    const double u = kPiHalf * std::sinh(t);
    // 1 - tanh(u) = 2 e^{-2u} / (1 + e^{-2u}) for u >= 0.
    const double e = std::exp(-2.0 * std::abs(u));
    TsNode n;
    n.offset = 2.0 * e / (1.0 + e);
    const double ch = std::cosh(u);
    n.weight = kPiHalf * std::cosh(t) / (ch * ch);
    return n;
}

} // namespace

QuadResult tanh_sinh(const Integrand& f, double a, double b, double tol, int max_level) {
    QuadResult res;
    if (!(b > a)) {
        res.converged = true;
        return res;
    }
    const double r = 0.5 * (b - a);

    // Beyond |t| ~ 6.5 the node offsets underflow even against 1e-300
    // endpoint singularities.
    const double t_max = 6.5;

    auto sample = [&](double t) -> double {
        const TsNode n = ts_node(t);
        if (n.offset <= 0.0 || n.weight < 1e-300) return 0.0;
        const double d = r * n.offset; // distance to the near endpoint
        double acc = 0.0;
        // +t node sits near b, -t node near a; t = 0 is the midpoint.
        if (t == 0.0) return n.weight * f(a + r, r, r);
        acc += n.weight * f(b - d, (b - d) - a, d);
        acc += n.weight * f(a + d, d, (b - a) - d);
        return acc;
    };

    double step = 1.0;
    double sum = sample(0.0);
    for (double t = step; t <= t_max; t += step) sum += sample(t);
    double prev = sum * step * r;

    for (int level = 1; level <= max_level; ++level) {
        step *= 0.5;
        double add = 0.0;
        for (double t = step; t <= t_max; t += 2.0 * step) add += sample(t);
        sum += add;
        const double cur = sum * step * r;
        res.levels = level;
        res.error = std::abs(cur - prev);
        res.value = cur;
        if (level >= 3 && res.error <= tol * std::max(1.0, std::abs(cur))) {
            res.converged = true;
            return res;
        }
        prev = cur;
    }
    return res;
}

double hamiltonian(double x, double y, double eta) {
    return (x * x - y + 0.5 * eta) / (y * y);
}

double OvalGeometry::hamiltonian_residual() const {
    double r = std::abs(hamiltonian(0.0, y_a, eta) - h);
    r = std::max(r, std::abs(hamiltonian(0.0, y_c, eta) - h));
    r = std::max(r, std::abs(hamiltonian(x_b, eta, eta) - h));
    r = std::max(r, std::abs(hamiltonian(-x_b, eta, eta) - h));
    return r;
}

OvalGeometry oval_endpoints(double h, double eta) {
    if (!(eta > 0.0)) throw std::domain_error("oval_endpoints: eta must be positive");
    const double h_min = -0.5 / eta;
    if (h < h_min || h >= 0.0)
        throw std::domain_error("oval_endpoints: h outside [-1/(2 eta), 0)");

    OvalGeometry g;
    g.h = h;
    g.eta = eta;
    const double s = std::sqrt(std::max(0.0, 2.0 * eta * h + 1.0));
    if (h == h_min || s == 0.0) {
        g.y_a = g.y_c = eta;
        g.x_b = 0.0;
        return g;
    }
    // Roots of h y^2 + y - eta/2 written to avoid cancellation.
    g.y_a = (1.0 + s) / (-2.0 * h);
    g.y_c = eta / (1.0 + s); // = (eta/2) / ((1+s)/2), product form of the small root
    g.x_b = eta * std::sqrt(h + 0.5 / eta);
    return g;
}

namespace {

struct ArcSetup {
    double lo, hi;   // y-range of the arc
    double sign_dy;  // orientation of the dy integral relative to lo->hi
    double x_sign;   // +1 right arcs, -1 left arcs
};

ArcSetup arc_setup(int side, const OvalGeometry& g) {
    ArcSetup s{};
    switch (side) {
        case 1: s = {g.eta, g.y_a, -1.0, 1.0}; break;  // A -> B, y decreasing
        case 2: s = {g.y_c, g.eta, -1.0, 1.0}; break;  // B -> C, y decreasing
        case 3: s = {g.y_c, g.eta, 1.0, -1.0}; break;  // C -> D, y increasing
        case 4: s = {g.eta, g.y_a, 1.0, -1.0}; break;  // D -> A, y increasing
        default: throw std::invalid_argument("arc side must be 1..4");
    }
    return s;
}

// x(y)^2 = |h| (y_a - y)(y - y_c) on the oval, in factored form.
double radicand(const OvalGeometry& g, double y, double da_to_ya, double da_to_yc) {
    (void)y;
    return std::abs(g.h) * da_to_ya * da_to_yc;
}

double ipow(double x, int n) {
    if (n < 0) return 1.0 / ipow(x, -n);
    double acc = 1.0, base = x;
    while (n > 0) {
        if (n & 1) acc *= base;
        base *= base;
        n >>= 1;
    }
    return acc;
}

} // namespace

double arc_integral_dy(int side, int i, int j, double h, double eta, double tol) {
    if (i < 0) throw std::invalid_argument("arc_integral_dy: i must be >= 0");
    const OvalGeometry g = oval_endpoints(h, eta);
    if (g.x_b == 0.0 && g.y_a == g.y_c) return 0.0; // degenerate oval
    const ArcSetup s = arc_setup(side, g);

    // Distances to y_a / y_c from the transform's endpoint distances: on
    // sides 1 and 4 the hi endpoint is y_a; the eta endpoint is interior
    // to the root factorization.
    const bool upper = (side == 1 || side == 4);
    auto f = [&](double y, double da, double db) -> double {
        const double to_ya = upper ? db : (g.y_a - y);
        const double to_yc = upper ? (y - g.y_c) : da;
        const double x2 = radicand(g, y, to_ya, to_yc);
        if (x2 <= 0.0) return 0.0;
        double xi = 1.0;
        if (i > 0) xi = ipow(s.x_sign * std::sqrt(x2), i);
        return xi * ipow(y, j - 3);
    };

    const QuadResult q = tanh_sinh(f, s.lo, s.hi, tol);
    if (!q.converged)
        throw QuadratureError("arc_integral_dy: tolerance not met (near-degenerate oval?)");
    return s.sign_dy * q.value;
}

double arc_integral_dx(int side, int i, int exponent, double h, double eta, double tol) {
    if (i < 0) throw std::invalid_argument("arc_integral_dx: i must be >= 0");
    const OvalGeometry g = oval_endpoints(h, eta);
    if (g.x_b == 0.0 && g.y_a == g.y_c) return 0.0;
    const ArcSetup s = arc_setup(side, g);
    const bool upper = (side == 1 || side == 4);

    // dx = x'(y) dy with x'(y) = |h| (y_a + y_c - 2y) / (2 x); the 1/x
    // blowup at the y-axis corner is integrable and handled by the
    // double-exponential nodes.
    auto f = [&](double y, double da, double db) -> double {
        const double to_ya = upper ? db : (g.y_a - y);
        const double to_yc = upper ? (y - g.y_c) : da;
        const double x2 = radicand(g, y, to_ya, to_yc);
        if (x2 <= 0.0) return 0.0;
        const double x = s.x_sign * std::sqrt(x2);
        const double dxdy = std::abs(g.h) * (to_yc - to_ya) * 0.5 / x;
        // to_yc - to_ya = (y - y_c) - (y_a - y) = 2y - (y_a + y_c); the
        // derivative of x^2 is |h| (y_a + y_c - 2y), so flip the sign.
        return ipow(x, i) * ipow(y, exponent) * (-dxdy);
    };

    const QuadResult q = tanh_sinh(f, s.lo, s.hi, tol);
    if (!q.converged)
        throw QuadratureError("arc_integral_dx: tolerance not met (near-degenerate oval?)");
    return s.sign_dy * q.value;
}

double generator_quadrature(Gen g, double h, double eta, double tol) {
    switch (g) {
        case Gen::I01: return arc_integral_dy(1, 0, 1, h, eta, tol);
        case Gen::I20: return arc_integral_dy(1, 2, 0, h, eta, tol);
        case Gen::I10: return arc_integral_dy(1, 1, 0, h, eta, tol);
        case Gen::I11: return arc_integral_dy(1, 1, 1, h, eta, tol);
        case Gen::J01: return arc_integral_dy(2, 0, 1, h, eta, tol);
        case Gen::J20: return arc_integral_dy(2, 2, 0, h, eta, tol);
        case Gen::J10: return arc_integral_dy(2, 1, 0, h, eta, tol);
        case Gen::J11: return arc_integral_dy(2, 1, 1, h, eta, tol);
        case Gen::U01: return arc_integral_dy(1, 0, 1, h, eta, tol) + arc_integral_dy(2, 0, 1, h, eta, tol);
        case Gen::U20: return arc_integral_dy(1, 2, 0, h, eta, tol) + arc_integral_dy(2, 2, 0, h, eta, tol);
        case Gen::U10: return arc_integral_dy(1, 1, 0, h, eta, tol) + arc_integral_dy(2, 1, 0, h, eta, tol);
        case Gen::U11: return arc_integral_dy(1, 1, 1, h, eta, tol) + arc_integral_dy(2, 1, 1, h, eta, tol);
        case Gen::V10: return arc_integral_dy(1, 1, 0, h, eta, tol) + arc_integral_dy(4, 1, 0, h, eta, tol);
        case Gen::V11: return arc_integral_dy(1, 1, 1, h, eta, tol) + arc_integral_dy(4, 1, 1, h, eta, tol);
        case Gen::Vt10: return arc_integral_dy(2, 1, 0, h, eta, tol) + arc_integral_dy(3, 1, 0, h, eta, tol);
        case Gen::Vt11: return arc_integral_dy(2, 1, 1, h, eta, tol) + arc_integral_dy(3, 1, 1, h, eta, tol);
    }
    throw std::invalid_argument("generator_quadrature: bad generator");
}

std::function<double(Gen)> quadrature_basis(double h, double eta, double tol) {
    auto cache = std::make_shared<std::map<Gen, double>>();
    return [=](Gen g) {
        auto it = cache->find(g);
        if (it != cache->end()) return it->second;
        const double v = generator_quadrature(g, h, eta, tol);
        cache->emplace(g, v);
        return v;
    };
}

const char* pf_system_name(PfSystem sys) {
    switch (sys) {
        case PfSystem::IEven: return "I01/I20";
        case PfSystem::IOdd: return "I10/I11";
        case PfSystem::JEven: return "J01/J20";
        case PfSystem::JOdd: return "J10/J11";
        case PfSystem::UEven: return "U01/U20";
        case PfSystem::UOdd: return "U10/U11";
        case PfSystem::V: return "V10/V11";
        case PfSystem::Vt: return "Vt10/Vt11";
    }
    return "?";
}

PfResidual pf_residual(PfSystem sys, double h, double eta, double step, double quad_tol) {
    const double tol = quad_tol;
    struct Pair { Gen a, b; };
    Pair p{};
    switch (sys) {
        case PfSystem::IEven: p = {Gen::I01, Gen::I20}; break;
        case PfSystem::IOdd: p = {Gen::I10, Gen::I11}; break;
        case PfSystem::JEven: p = {Gen::J01, Gen::J20}; break;
        case PfSystem::JOdd: p = {Gen::J10, Gen::J11}; break;
        case PfSystem::UEven: p = {Gen::U01, Gen::U20}; break;
        case PfSystem::UOdd: p = {Gen::U10, Gen::U11}; break;
        case PfSystem::V: p = {Gen::V10, Gen::V11}; break;
        case PfSystem::Vt: p = {Gen::Vt10, Gen::Vt11}; break;
    }
    const double c = 0.5 / eta;
    if (h <= -c || h >= 0.0)
        throw std::domain_error("pf_residual: h must lie in the open annulus");

    // Near an endpoint the step shrinks to fit and a Richardson pass
    // compensates the larger relative truncation error.
    const double room = 0.45 * std::min(h + c, -h);
    const bool shrunk = step > room;
    const double s = shrunk ? room : step;

    auto diff = [&](Gen g) {
        auto central = [&](double dd) {
            return (generator_quadrature(g, h + dd, eta, tol) -
                    generator_quadrature(g, h - dd, eta, tol)) / (2.0 * dd);
        };
        const double d1 = central(s);
        if (!shrunk) return d1;
        const double d2 = central(0.5 * s);
        return (4.0 * d2 - d1) / 3.0;
    };

    const double a0 = generator_quadrature(p.a, h, eta, tol);
    const double b0 = generator_quadrature(p.b, h, eta, tol);
    const double da = diff(p.a);
    const double db = diff(p.b);

    const double root = std::sqrt(h + c);
    PfResidual r;
    switch (sys) {
        case PfSystem::IEven:
        case PfSystem::JEven:
        case PfSystem::UEven: {
            // (G01, G20): G01 = 2(h+c) G01'; G20 = (h+c) G01' + h G20' + k(h+c)
            // with k = -1/2, +1/2, 0 for the I, J, U rows.
            double k = 0.0;
            if (sys == PfSystem::IEven) k = -0.5;
            if (sys == PfSystem::JEven) k = 0.5;
            r.first = a0 - 2.0 * (h + c) * da;
            r.second = b0 - (h + c) * da - h * db - k * (h + c);
            break;
        }
        default: {
            // (G10, G11): G10 = (h+c) G10'; G11 = G10' + 2h G11' + k sqrt(h+c)
            // with k = -1, +1, 0, -2, +2 for I, J, U, V, Vt.
            double k = 0.0;
            if (sys == PfSystem::IOdd) k = -1.0;
            if (sys == PfSystem::JOdd) k = 1.0;
            if (sys == PfSystem::V) k = -2.0;
            if (sys == PfSystem::Vt) k = 2.0;
            r.first = a0 - (h + c) * da;
            r.second = b0 - da - 2.0 * h * db - k * root;
            break;
        }
    }
    return r;
}

} // namespace melkit
