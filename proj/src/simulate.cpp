#include "melkit/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "melkit/parallel.hpp"

namespace melkit {

int region_of(double x, double y, double eta) {
    if (x >= 0.0) return y >= eta ? 1 : 2;
    return y >= eta ? 4 : 3;
}

Derivative vector_field(const PhaseState& s, const SimConfig& cfg,
                        const PerturbationSpec& spec) {
    Derivative d;
    d.dx = s.y - 2.0 * s.x * s.x - cfg.eta;
    d.dy = -2.0 * s.x * s.y;
    if (cfg.eps != 0.0) {
        d.dx += cfg.eps * spec.eval_f(s.region, s.x, s.y);
        d.dy += cfg.eps * spec.eval_g(s.region, s.x, s.y);
    }
    d.dx *= cfg.time_direction;
    d.dy *= cfg.time_direction;
    return d;
}

namespace {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

// Dormand-Prince 5(4) step from (x, y) in a fixed region.
struct DpStep {
    Vec2 value;   // 5th order solution
    double err;   // embedded error estimate (scaled)
};

DpStep dp45(const PhaseState& s, double dt, const SimConfig& cfg,
            const PerturbationSpec& spec) {
    auto f = [&](double x, double y) {
        PhaseState p{x, y, s.region};
        const Derivative d = vector_field(p, cfg, spec);
        return Vec2{d.dx, d.dy};
    };

    const Vec2 k1 = f(s.x, s.y);
    const Vec2 k2 = f(s.x + dt * (0.2 * k1.x), s.y + dt * (0.2 * k1.y));
    const Vec2 k3 = f(s.x + dt * (3.0 / 40 * k1.x + 9.0 / 40 * k2.x),
                      s.y + dt * (3.0 / 40 * k1.y + 9.0 / 40 * k2.y));
    const Vec2 k4 = f(s.x + dt * (44.0 / 45 * k1.x - 56.0 / 15 * k2.x + 32.0 / 9 * k3.x),
                      s.y + dt * (44.0 / 45 * k1.y - 56.0 / 15 * k2.y + 32.0 / 9 * k3.y));
    const Vec2 k5 = f(
        s.x + dt * (19372.0 / 6561 * k1.x - 25360.0 / 2187 * k2.x + 64448.0 / 6561 * k3.x -
                    212.0 / 729 * k4.x),
        s.y + dt * (19372.0 / 6561 * k1.y - 25360.0 / 2187 * k2.y + 64448.0 / 6561 * k3.y -
                    212.0 / 729 * k4.y));
    const Vec2 k6 = f(
        s.x + dt * (9017.0 / 3168 * k1.x - 355.0 / 33 * k2.x + 46732.0 / 5247 * k3.x +
                    49.0 / 176 * k4.x - 5103.0 / 18656 * k5.x),
        s.y + dt * (9017.0 / 3168 * k1.y - 355.0 / 33 * k2.y + 46732.0 / 5247 * k3.y +
                    49.0 / 176 * k4.y - 5103.0 / 18656 * k5.y));

    Vec2 y5;
    y5.x = s.x + dt * (35.0 / 384 * k1.x + 500.0 / 1113 * k3.x + 125.0 / 192 * k4.x -
                       2187.0 / 6784 * k5.x + 11.0 / 84 * k6.x);
    y5.y = s.y + dt * (35.0 / 384 * k1.y + 500.0 / 1113 * k3.y + 125.0 / 192 * k4.y -
                       2187.0 / 6784 * k5.y + 11.0 / 84 * k6.y);

    const Vec2 k7 = f(y5.x, y5.y);
    Vec2 y4;
    y4.x = s.x + dt * (5179.0 / 57600 * k1.x + 7571.0 / 16695 * k3.x + 393.0 / 640 * k4.x -
                       92097.0 / 339200 * k5.x + 187.0 / 2100 * k6.x + 1.0 / 40 * k7.x);
    y4.y = s.y + dt * (5179.0 / 57600 * k1.y + 7571.0 / 16695 * k3.y + 393.0 / 640 * k4.y -
                       92097.0 / 339200 * k5.y + 187.0 / 2100 * k6.y + 1.0 / 40 * k7.y);

    DpStep out;
    out.value = y5;
    const double scale = 1.0 + std::max(std::abs(y5.x), std::abs(y5.y));
    out.err = std::max(std::abs(y5.x - y4.x), std::abs(y5.y - y4.y)) / scale;
    return out;
}

// Event functions: signed distances to the switching lines.
double event_value(int kind, const Vec2& v, double eta) {
    return kind == 0 ? v.x : v.y - eta;
}

int next_region(int region, int kind) {
    // Crossing x = 0 swaps 1<->4, 2<->3; crossing y = eta swaps 1<->2, 3<->4.
    if (kind == 0) return region == 1 ? 4 : region == 4 ? 1 : region == 2 ? 3 : 2;
    return region == 1 ? 2 : region == 2 ? 1 : region == 3 ? 4 : 3;
}

} // namespace

Trajectory integrate_orbit(const PhaseState& start, const SimConfig& cfg,
                           const PerturbationSpec& spec,
                           const std::function<bool(const Trajectory&)>& stop,
                           bool record_points) {
    Trajectory traj;
    PhaseState s = start;
    double t = 0.0;
    double dt = 1e-3;
    const double dt_min = 1e-14;
    const double dt_max = 0.1;

    // Signs of the event functions "as last seen"; exactly-on-line starts
    // adopt the sign of the declared region so the departing crossing is
    // not re-detected.
    auto region_sign = [&](int kind) {
        if (kind == 0) return (s.region == 1 || s.region == 2) ? 1.0 : -1.0;
        return (s.region == 1 || s.region == 4) ? 1.0 : -1.0;
    };
    double sign_x = s.x != 0.0 ? (s.x > 0 ? 1.0 : -1.0) : region_sign(0);
    double sign_y = s.y != cfg.eta ? (s.y > cfg.eta ? 1.0 : -1.0) : region_sign(1);

    if (record_points) traj.points.push_back({t, s.x, s.y, s.region});

    int steps_guard = 0;
    while (t < cfg.max_time) {
        if (++steps_guard > 50'000'000) throw SimulationError("integrate_orbit: step limit");
        dt = std::min(dt, cfg.max_time - t);

        DpStep st = dp45(s, dt, cfg, spec);
        if (st.err > cfg.tol && dt > dt_min) {
            dt = std::max(dt_min, 0.9 * dt * std::pow(cfg.tol / st.err, 0.2));
            continue;
        }

        // Detect the earliest switching-line crossing inside the step.
        int hit_kind = -1;
        double hit_dt = dt;
        Vec2 hit_val{};
        for (int kind = 0; kind < 2; ++kind) {
            const double before = kind == 0 ? sign_x : sign_y;
            const double after = event_value(kind, st.value, cfg.eta);
            if (after == 0.0 || before * after < 0.0) {
                // Bisect the substep length; each probe is one RK step.
                double lo = 0.0, hi = dt;
                Vec2 vhi = st.value;
                for (int it = 0; it < 200; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const Vec2 vm = dp45(s, mid, cfg, spec).value;
                    const double em = event_value(kind, vm, cfg.eta);
                    if (std::abs(em) < cfg.event_tol) { hi = mid; vhi = vm; break; }
                    if (before * em < 0.0) { hi = mid; vhi = vm; }
                    else lo = mid;
                    if (hi - lo < dt_min) break;
                }
                if (hi < hit_dt) {
                    hit_dt = hi;
                    hit_kind = kind;
                    hit_val = vhi;
                }
            }
        }

        if (hit_kind >= 0) {
            // Transversality check at the located event, scaled so tiny
            // near-center orbits (crossing speed ~ orbit radius) pass.
            PhaseState at{hit_val.x, hit_val.y, s.region};
            const Derivative d = vector_field(at, cfg, spec);
            const double speed = hit_kind == 0 ? std::abs(d.dx) : std::abs(d.dy);
            const double orbit_scale = std::abs(at.x) + std::abs(at.y - cfg.eta);
            if (speed < 1e-10 * (1.0 + orbit_scale))
                throw SimulationError("integrate_orbit: near-tangent switching crossing");

            // Snap exactly onto the line and switch region.
            if (hit_kind == 0) at.x = 0.0;
            else at.y = cfg.eta;
            at.region = next_region(s.region, hit_kind);
            t += hit_dt;
            s = at;
            sign_x = (s.region == 1 || s.region == 2) ? 1.0 : -1.0;
            sign_y = (s.region == 1 || s.region == 4) ? 1.0 : -1.0;

            traj.events.push_back({t, hit_kind, s});
            if (static_cast<int>(traj.events.size()) > cfg.max_events)
                throw SimulationError("integrate_orbit: event limit exceeded");
            if (record_points) traj.points.push_back({t, s.x, s.y, s.region});
            traj.final_state = s;
            traj.final_time = t;
            if (stop(traj)) return traj;
            dt = std::min(dt, dt_max);
            continue;
        }

        t += dt;
        s = PhaseState{st.value.x, st.value.y, s.region};
        if (s.x != 0.0) sign_x = s.x > 0 ? 1.0 : -1.0;
        if (s.y != cfg.eta) sign_y = s.y > cfg.eta ? 1.0 : -1.0;
        if (record_points) traj.points.push_back({t, s.x, s.y, s.region});
        traj.final_state = s;
        traj.final_time = t;
        if (stop(traj)) return traj;

        if (st.err > 0.0)
            dt = std::min(dt_max, 0.9 * dt * std::pow(cfg.tol / std::max(st.err, 1e-300), 0.2));
        else
            dt = std::min(dt_max, dt * 5.0);
        dt = std::max(dt, dt_min);
    }
    // Ran to max_time without the stop condition; hand back what we have.
    traj.final_state = s;
    traj.final_time = t;
    return traj;
}

double poincare_displacement(double y0, const SimConfig& cfg, const PerturbationSpec& spec) {
    if (!(y0 > cfg.eta))
        throw std::domain_error("poincare_displacement: section requires y0 > eta");
    PhaseState start{0.0, y0, 1};
    const Trajectory traj = integrate_orbit(
        start, cfg, spec,
        [](const Trajectory& tr) { return tr.events.size() >= 4; });
    if (traj.events.size() != 4 || traj.events.back().kind != 0)
        throw SimulationError("poincare_displacement: revolution did not close on the section");
    return traj.events.back().state.y - y0;
}

CycleReport find_limit_cycles(const SimConfig& cfg, const PerturbationSpec& spec,
                              const std::vector<double>& y0_grid,
                              const ZeroReport* melnikov_zeros) {
    CycleReport rep;
    if (y0_grid.size() < 2) return rep;

    std::vector<double> disp(y0_grid.size());
    parallel_for(y0_grid.size(),
                 [&](size_t i) { disp[i] = poincare_displacement(y0_grid[i], cfg, spec); });
    rep.scan.reserve(y0_grid.size());
    for (size_t i = 0; i < y0_grid.size(); ++i) rep.scan.emplace_back(y0_grid[i], disp[i]);

    double scale = 0.0;
    for (double d : disp) scale = std::max(scale, std::abs(d));
    // With |d| ~ eps * M, a profile at integrator-noise level means no
    // isolated root can be certified.
    if (scale < std::max(1e3 * cfg.tol, 1e-14)) {
        rep.displacement_identically_zero = true;
        return rep;
    }

    for (size_t i = 0; i + 1 < y0_grid.size(); ++i) {
        double a = y0_grid[i], b = y0_grid[i + 1];
        double fa = disp[i], fb = disp[i + 1];
        if (fa == 0.0 || !(fa * fb < 0.0)) continue;
        for (int it = 0; it < 200 && b - a > 1e-12 * std::max(1.0, std::abs(a)); ++it) {
            const double mid = 0.5 * (a + b);
            const double fm = poincare_displacement(mid, cfg, spec);
            if (fm == 0.0) { a = b = mid; break; }
            if (fa * fm < 0.0) { b = mid; fb = fm; }
            else { a = mid; fa = fm; }
        }
        DetectedCycle cyc;
        cyc.y = 0.5 * (a + b);
        cyc.h = section_energy(cyc.y, cfg.eta);
        const double dy = 1e-6 * std::max(1.0, cyc.y);
        cyc.deriv = (poincare_displacement(cyc.y + dy, cfg, spec) -
                     poincare_displacement(cyc.y - dy, cfg, spec)) / (2.0 * dy);
        if (melnikov_zeros && !melnikov_zeros->zeros.empty()) {
            double best = 0.0, best_d = 1e300;
            for (const auto& z : melnikov_zeros->zeros) {
                const double d = std::abs(z.h - cyc.h);
                if (d < best_d) { best_d = d; best = z.h; }
            }
            cyc.matched_zero = best;
            cyc.dh = best_d;
        }
        rep.cycles.push_back(cyc);
    }
    return rep;
}

} // namespace melkit
