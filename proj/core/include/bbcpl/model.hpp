#pragma once

// Average model of the buck-boost converter feeding a constant power load,
// in physical and normalized coordinates.
//
// Normalized coordinates:
//   x1 = sqrt(L/C) * i / E,   x2 = v / E,   tau = t / sqrt(L C)
// and the single dimensionless parameter D = (P / E^2) * sqrt(L/C).

#include "bbcpl/linalg.hpp"

namespace bbcpl {

/// Normalized x2 below this value is treated as the load singularity.
inline constexpr double kSingularityFloor = 1e-9;

struct PhysicalParams {
    double L{0.0}; ///< inductance [H]
    double C{0.0}; ///< capacitance [F]
    double E{0.0}; ///< source voltage [V]
    double P{0.0}; ///< load power [W]

    /// Throws DomainError unless all four are strictly positive and finite.
    void validate() const;
};

/// Normalized state (x1, x2) in the open positive quadrant.
struct State {
    double x1{0.0};
    double x2{0.0};

    [[nodiscard]] Vec2 vec() const { return {x1, x2}; }
    [[nodiscard]] bool in_open_quadrant() const { return x1 > 0.0 && x2 > 0.0; }
};

struct NormalizedParams {
    double D{0.0};
};

/// Assignable operating point for a chosen normalized output voltage.
struct Equilibrium {
    double x1_star{0.0};
    double x2_star{0.0};
    double u_star{0.0};

    [[nodiscard]] State state() const { return {x1_star, x2_star}; }
};

struct PhysicalState {
    double i{0.0}; ///< inductor current [A]
    double v{0.0}; ///< output voltage [V]
};

[[nodiscard]] NormalizedParams normalize(const PhysicalParams& p);

/// Inverse of normalize for the load power: P = D * E^2 / sqrt(L/C).
[[nodiscard]] double load_power(double D, const PhysicalParams& p);

[[nodiscard]] State to_normalized(double i, double v, const PhysicalParams& p);
[[nodiscard]] PhysicalState from_normalized(State x, const PhysicalParams& p);

[[nodiscard]] double tau_of_t(double t, const PhysicalParams& p);
[[nodiscard]] double t_of_tau(double tau, const PhysicalParams& p);

/// Drift f(x) = (-x2, x1 - D/x2) of the input-affine form xdot = f(x) + g(x) u.
[[nodiscard]] Vec2 drift(State x, double D);

/// Input vector g(x) = (x2 + 1, -x1).
[[nodiscard]] Vec2 input_vector(State x);

/// Right-hand side of the normalized model. Requires u in [0, 1] and x2 above
/// kSingularityFloor (SingularityError otherwise).
[[nodiscard]] Vec2 vector_field(State x, double u, double D);

/// Equilibrium with x1* = D/x2* + D and u* = x2*/(1 + x2*).
[[nodiscard]] Equilibrium equilibrium_for(double x2_star, double D);

/// x1 - D/x2 - D; zero exactly on the assignable equilibrium set.
[[nodiscard]] double assignability_residual(State x, double D);

} // namespace bbcpl
