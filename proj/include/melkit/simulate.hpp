#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "melkit/melnikov.hpp"

namespace melkit {

// Phase point with the quadrant the piecewise field is taken from. The
// region tag is authoritative on the switching lines themselves, where the
// coordinates alone are ambiguous.
struct PhaseState {
    double x = 0.0;
    double y = 0.0;
    int region = 1; // 1: x>0,y>eta  2: x>0,y<eta  3: x<0,y<eta  4: x<0,y>eta
};

int region_of(double x, double y, double eta);

struct SimConfig {
    double eta = 1.0;
    double eps = 1e-3;
    double tol = 1e-12;        // integrator error tolerance
    double event_tol = 1e-12;  // |x| or |y - eta| at located events
    int max_events = 100000;
    double max_time = 1e4;     // integration returns when this is reached
    double time_direction = 1.0; // -1 integrates the reversed flow
};

// Energy H(0, y) of a section point (x = 0).
inline double section_energy(double y, double eta) {
    return (0.5 * eta - y) / (y * y);
}

struct Derivative {
    double dx = 0.0;
    double dy = 0.0;
};

// Piecewise vector field (unperturbed quadratic center + eps * piece).
Derivative vector_field(const PhaseState& s, const SimConfig& cfg,
                        const PerturbationSpec& spec);

struct SwitchEvent {
    double t = 0.0;
    int kind = 0; // 0: crossed x = 0, 1: crossed y = eta
    PhaseState state;
};

struct TrajectoryPoint {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    int region = 1;
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    std::vector<SwitchEvent> events;
    PhaseState final_state;
    double final_time = 0.0;
};

struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Adaptive Runge-Kutta integration with bisection-located switching
// events; the region flips at each event and the state is snapped onto the
// line. stop(trajectory) is polled after every accepted step and event.
Trajectory integrate_orbit(const PhaseState& start, const SimConfig& cfg,
                           const PerturbationSpec& spec,
                           const std::function<bool(const Trajectory&)>& stop,
                           bool record_points = false);

// Return displacement y_back - y0 on the section {x = 0, y > eta} after
// one full revolution (four switching events).
double poincare_displacement(double y0, const SimConfig& cfg, const PerturbationSpec& spec);

struct DetectedCycle {
    double y = 0.0;       // section ordinate
    double h = 0.0;       // energy H(0, y)
    double deriv = 0.0;   // displacement derivative estimate at the root
    std::optional<double> matched_zero; // nearest Melnikov zero
    double dh = 0.0;      // |h - matched_zero|
};

struct CycleReport {
    std::vector<DetectedCycle> cycles;
    bool displacement_identically_zero = false;
    std::vector<std::pair<double, double>> scan; // (y0, displacement)
};

// Brackets and bisects roots of the Poincare displacement over the y0
// grid; detected cycles are matched against the supplied Melnikov zeros.
CycleReport find_limit_cycles(const SimConfig& cfg, const PerturbationSpec& spec,
                              const std::vector<double>& y0_grid,
                              const ZeroReport* melnikov_zeros = nullptr);

} // namespace melkit
