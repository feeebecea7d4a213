#pragma once

// Ground-truth continuous-time plant, its RK4 sampler, and trajectory-based
// dataset collection under random excitation.

#include <array>
#include <cstdint>
#include <string>

#include "asmpc/error.hpp"
#include "asmpc/rng.hpp"

namespace asmpc {

struct PlantState {
    double x1 = 0.0;
    double x2 = 0.0;

    bool finite() const { return std::isfinite(x1) && std::isfinite(x2); }
};

struct ControlInput {
    double u1 = 0.0;
    double u2 = 0.0;
};

// Axis-aligned box, used for both state and input constraint sets.
struct Box {
    double lo1, hi1;
    double lo2, hi2;

    bool contains(double a, double b) const {
        return a >= lo1 && a <= hi1 && b >= lo2 && b <= hi2;
    }
    // Scale about the box center (factor 2 doubles each half-width).
    Box scaled(double factor) const {
        const double c1 = 0.5 * (lo1 + hi1), h1 = 0.5 * (hi1 - lo1);
        const double c2 = 0.5 * (lo2 + hi2), h2 = 0.5 * (hi2 - lo2);
        return Box{c1 - factor * h1, c1 + factor * h1, c2 - factor * h2, c2 + factor * h2};
    }
};

inline constexpr Box kStateBox{-5.0, 3.0, 0.0, 10.0};
inline constexpr Box kInputBox{-1.0, 1.0, -1.0, 1.0};

inline ControlInput clamp_input(ControlInput u, const Box& box = kInputBox) {
    u.u1 = std::min(std::max(u.u1, box.lo1), box.hi1);
    u.u2 = std::min(std::max(u.u2, box.lo2), box.hi2);
    return u;
}

// Continuous-time right-hand side of the plant.
inline std::array<double, 2> plant_derivative(const PlantState& x, const ControlInput& u) {
    const double d1 = 10.0 * x.x1 - x.x1 * x.x2 * x.x2 + 0.5 * x.x1 * x.x1 +
                      0.5 * x.x1 * u.u1 + 0.5 * u.u2;
    const double d2 = -x.x2 + 0.1 * x.x1 * x.x1 + 3.0 * x.x1 * x.x1 * x.x2 -
                      x.x1 * x.x2 * u.u1;
    return {d1, d2};
}

// Divergence during integration; carries the last finite state reached.
struct PlantDivergence : DivergenceError {
    PlantDivergence(const std::string& what, PlantState last)
        : DivergenceError(what), last_finite_state(last) {}
    PlantState last_finite_state;
};

// Classical RK4 over dt with `substeps` equal pieces; input held constant.
// 100 substeps keeps the halving error below 1e-8 everywhere in the
// operating region of this plant (the vector field is stiff near the
// x1-growth corner).
inline PlantState plant_step(PlantState x, const ControlInput& u_raw, double dt,
                             int substeps = 100) {
    if (!(dt > 0.0)) throw ContractError("plant_step: dt must be positive");
    const ControlInput u = clamp_input(u_raw);
    const double h = dt / substeps;
    for (int s = 0; s < substeps; ++s) {
        const auto k1 = plant_derivative(x, u);
        const auto k2 = plant_derivative({x.x1 + 0.5 * h * k1[0], x.x2 + 0.5 * h * k1[1]}, u);
        const auto k3 = plant_derivative({x.x1 + 0.5 * h * k2[0], x.x2 + 0.5 * h * k2[1]}, u);
        const auto k4 = plant_derivative({x.x1 + h * k3[0], x.x2 + h * k3[1]}, u);
        PlantState next{x.x1 + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
                        x.x2 + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
        if (!next.finite())
            throw PlantDivergence("plant_step: state diverged at substep " + std::to_string(s), x);
        x = next;
    }
    return x;
}

}  // namespace asmpc
