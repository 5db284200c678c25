#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "melkit/quadrature.hpp"
#include "melkit/simulate.hpp"

using namespace melkit;

namespace {

PerturbationSpec zero_spec(double /*eta*/ = 1.0) {
    return PerturbationSpec(Rational(1), 1, PerturbationCase::General);
}

// f = (7/6) x - x y on every piece: one simple Melnikov zero at -25/98.
PerturbationSpec one_zero_spec() {
    PerturbationSpec s(Rational(1), 2, PerturbationCase::Smooth);
    for (int p = 1; p <= 4; ++p) {
        s.set_a(p, 1, 0, Rational(7, 6));
        s.set_a(p, 1, 1, Rational(-1));
    }
    return s;
}

// f = x on every piece: single-signed Melnikov function.
PerturbationSpec signed_spec() {
    PerturbationSpec s(Rational(1), 1, PerturbationCase::Smooth);
    for (int p = 1; p <= 4; ++p) s.set_a(p, 1, 0, Rational(1));
    return s;
}

} // namespace

TEST_CASE("vector field values") {
    SimConfig cfg;
    cfg.eps = 0.0;
    const PerturbationSpec s = zero_spec();

    const Derivative at_center = vector_field({0.0, 1.0, 1}, cfg, s);
    CHECK(at_center.dx == 0.0);
    CHECK(at_center.dy == 0.0);

    const Derivative d = vector_field({0.5, 1.0, 1}, cfg, s);
    CHECK(d.dx == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(d.dy == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("perturbation is piecewise") {
    SimConfig cfg;
    cfg.eps = 1e-3;
    PerturbationSpec s(Rational(1), 1, PerturbationCase::General);
    s.set_a(1, 0, 0, Rational(1)); // f^1 = 1 only
    const Derivative in1 = vector_field({0.5, 1.5, 1}, cfg, s);
    const Derivative base1 = vector_field({0.5, 1.5, 1}, SimConfig{}, zero_spec());
    CHECK(in1.dx - base1.dx == doctest::Approx(1e-3).epsilon(1e-12));
    const Derivative in2 = vector_field({0.5, 0.5, 2}, cfg, s);
    const Derivative base2 = vector_field({0.5, 0.5, 2}, SimConfig{}, zero_spec());
    CHECK(in2.dx - base2.dx == 0.0);
}

TEST_CASE("region classification") {
    CHECK(region_of(0.1, 1.5, 1.0) == 1);
    CHECK(region_of(0.1, 0.5, 1.0) == 2);
    CHECK(region_of(-0.1, 0.5, 1.0) == 3);
    CHECK(region_of(-0.1, 1.5, 1.0) == 4);
}

TEST_CASE("unperturbed orbits close with conserved energy") {
    SimConfig cfg;
    cfg.eps = 0.0;
    const PerturbationSpec s = zero_spec();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> pick(1.2, 6.0);
    for (int trial = 0; trial < 8; ++trial) {
        const double y0 = pick(rng);
        const double h0 = section_energy(y0, cfg.eta);
        const Trajectory traj = integrate_orbit(
            {0.0, y0, 1}, cfg, s, [](const Trajectory& t) { return t.events.size() >= 4; });
        REQUIRE(traj.events.size() == 4);
        const PhaseState back = traj.events.back().state;
        CHECK(std::abs(back.y - y0) < 1e-8);
        CHECK(std::abs(hamiltonian(back.x, back.y, cfg.eta) - h0) < 1e-9);
    }
}

TEST_CASE("one revolution logs four alternating events") {
    SimConfig cfg;
    cfg.eps = 0.0;
    const Trajectory traj = integrate_orbit(
        {0.0, 2.0 + std::sqrt(2.0), 1}, cfg, zero_spec(),
        [](const Trajectory& t) { return t.events.size() >= 4; });
    REQUIRE(traj.events.size() == 4);
    CHECK(traj.events[0].kind == 1); // leaves region 1 across y = eta
    CHECK(traj.events[1].kind == 0);
    CHECK(traj.events[2].kind == 1);
    CHECK(traj.events[3].kind == 0);
    // Regions cycle 1 -> 2 -> 3 -> 4 -> 1 clockwise.
    CHECK(traj.events[0].state.region == 2);
    CHECK(traj.events[1].state.region == 3);
    CHECK(traj.events[2].state.region == 4);
    CHECK(traj.events[3].state.region == 1);
    // Event residuals are exact by the snap-to-line convention.
    CHECK(traj.events[1].state.x == 0.0);
    CHECK(traj.events[0].state.y == 1.0);
}

TEST_CASE("event location residual before snapping") {
    // Locate the first y = eta crossing by bisection and confirm the
    // pre-snap residual honors the configured tolerance.
    SimConfig cfg;
    cfg.eps = 0.0;
    cfg.event_tol = 1e-12;
    const Trajectory traj = integrate_orbit(
        {0.0, 3.0, 1}, cfg, zero_spec(),
        [](const Trajectory& t) { return !t.events.empty(); });
    REQUIRE(traj.events.size() == 1);
    // The snapped state lies on the line; the crossing abscissa must sit on
    // the oval of the initial energy to event precision.
    const double h0 = section_energy(3.0, cfg.eta);
    const double xb = oval_endpoints(h0, cfg.eta).x_b;
    CHECK(std::abs(traj.events[0].state.x - xb) < 1e-9);
}

TEST_CASE("near-equilibrium start stays near the center") {
    SimConfig cfg;
    cfg.eps = 0.0;
    cfg.max_time = 5.0;
    const Trajectory traj =
        integrate_orbit({0.0, 1.0 + 1e-9, 1}, cfg, zero_spec(),
                        [](const Trajectory&) { return false; }, true);
    for (const auto& p : traj.points) {
        CHECK(std::abs(p.x) < 1e-6);
        CHECK(std::abs(p.y - 1.0) < 1e-6);
    }
}

TEST_CASE("time reversal returns to the start") {
    SimConfig cfg;
    cfg.eps = 0.0;
    cfg.max_time = 1.0;
    const PhaseState start{0.3, 1.5, 1};
    const Trajectory fwd =
        integrate_orbit(start, cfg, zero_spec(), [](const Trajectory&) { return false; });
    SimConfig back_cfg = cfg;
    back_cfg.time_direction = -1.0;
    const Trajectory back = integrate_orbit(fwd.final_state, back_cfg, zero_spec(),
                                            [](const Trajectory&) { return false; });
    CHECK(std::abs(back.final_state.x - start.x) < 1e-8);
    CHECK(std::abs(back.final_state.y - start.y) < 1e-8);
}

TEST_CASE("unperturbed displacement vanishes") {
    SimConfig cfg;
    cfg.eps = 0.0;
    for (double y0 : {1.5, 2.0, 3.0, 4.5})
        CHECK(std::abs(poincare_displacement(y0, cfg, zero_spec())) < 1e-8);
    CHECK_THROWS_AS(poincare_displacement(0.9, cfg, zero_spec()), std::domain_error);
}

TEST_CASE("displacement scales linearly in eps") {
    const PerturbationSpec s = signed_spec();
    const double y0 = 3.0;
    double d1, d2, d4;
    {
        SimConfig cfg; cfg.eps = 1e-4; d1 = poincare_displacement(y0, cfg, s);
    }
    {
        SimConfig cfg; cfg.eps = 2e-4; d2 = poincare_displacement(y0, cfg, s);
    }
    {
        SimConfig cfg; cfg.eps = 4e-4; d4 = poincare_displacement(y0, cfg, s);
    }
    CHECK(std::abs(d2 / d1 - 2.0) < 0.05 * 2.0);
    CHECK(std::abs(d4 / d1 - 4.0) < 0.05 * 4.0);
}

TEST_CASE("displacement sign follows the Melnikov function") {
    // d = eps * M(h) + O(eps^2) with the clockwise orientation fixed by
    // the flow; check the sign agreement across the section.
    const PerturbationSpec s = one_zero_spec();
    const GeneratorConstants& k = calibrated(Rational(1));
    const ReducedExpr m = assemble(s);
    for (double eps : {1e-4, 1e-3}) {
        SimConfig cfg;
        cfg.eps = eps;
        for (double h : {-0.45, -0.40, -0.35, -0.30, -0.18, -0.12}) {
            const double y0 = oval_endpoints(h, 1.0).y_a;
            const double d = poincare_displacement(y0, cfg, s);
            const double mv = eval_M(m, k, h);
            INFO("eps=", eps, " h=", h);
            CHECK(d * mv > 0.0);
        }
    }
}

TEST_CASE("displacement magnitude tracks eps * M quantitatively") {
    const PerturbationSpec s = signed_spec();
    const GeneratorConstants& k = calibrated(Rational(1));
    const ReducedExpr m = assemble(s);
    SimConfig cfg;
    cfg.eps = 1e-4;
    const double h = -0.25;
    const double y0 = oval_endpoints(h, 1.0).y_a;
    const double d = poincare_displacement(y0, cfg, s);
    // dH/dy on the section converts the y-displacement to an energy one.
    const double dHdy = (y0 - 1.0) / (y0 * y0 * y0);
    const double dh_measured = d * dHdy;
    CHECK(dh_measured / cfg.eps == doctest::Approx(eval_M(m, k, h)).epsilon(2e-3));
}

TEST_CASE("limit cycle detection matches the Melnikov zero") {
    const PerturbationSpec s = one_zero_spec();
    const GeneratorConstants& k = calibrated(Rational(1));
    const ReducedExpr m = assemble(s);
    const ZeroReport zeros = count_zeros(m, k, ScanParams{}, 2, PerturbationCase::Smooth);
    REQUIRE(zeros.count == 1);

    SimConfig cfg;
    cfg.eps = 1e-3;
    std::vector<double> grid;
    for (int i = 0; i <= 16; ++i) {
        const double h = -0.48 + (0.44 / 16.0) * i;
        grid.push_back(oval_endpoints(h, 1.0).y_a);
    }
    const CycleReport rep = find_limit_cycles(cfg, s, grid, &zeros);
    REQUIRE(rep.cycles.size() == 1);
    CHECK(rep.cycles[0].matched_zero.has_value());
    CHECK(rep.cycles[0].dh < 10.0 * cfg.eps);
    CHECK(std::abs(rep.cycles[0].h - (-25.0 / 98.0)) < 10.0 * cfg.eps);
    CHECK(rep.cycles[0].deriv != 0.0);
    // The reported cycle is a genuine fixed point of the return map.
    CHECK(std::abs(poincare_displacement(rep.cycles[0].y, cfg, s)) < 1e-9);
}

TEST_CASE("identically zero displacement is reported as such") {
    SimConfig cfg;
    cfg.eps = 1e-3;
    const PerturbationSpec s = zero_spec(); // all-zero perturbation
    std::vector<double> grid{1.5, 2.0, 2.5, 3.0};
    const CycleReport rep = find_limit_cycles(cfg, s, grid, nullptr);
    CHECK(rep.displacement_identically_zero);
    CHECK(rep.cycles.empty());
}
