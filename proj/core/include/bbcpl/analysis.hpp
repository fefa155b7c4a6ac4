#pragma once

// Zero dynamics, secondary equilibria of the IDA-PBC closed loop, and
// sublevel-set estimates of its domain of attraction.

#include "bbcpl/linalg.hpp"
#include "bbcpl/model.hpp"

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace bbcpl {

// ---------------------------------------------------------------------------
// Zero dynamics

/// x2' with x1 pinned at x1*: D (x2 - x2*) / (x2* x2 (x2 + 1)).
[[nodiscard]] double zd_current_fixed(double x2, const Equilibrium& eq, double D);
/// Input that holds x1 = x1*: x2 / (x2 + 1).
[[nodiscard]] double zd_current_fixed_input(double x2);

/// x1' with x2 pinned at x2*, obtained by substituting the holding input into
/// the model: 1 - x1*/x1.
[[nodiscard]] double zd_voltage_fixed(double x1, const Equilibrium& eq, double D);
/// The commonly printed form 1 - (x1* - D)/x1, kept for comparison only.
[[nodiscard]] double zd_voltage_fixed_printed(double x1, const Equilibrium& eq, double D);
/// Input that holds x2 = x2*: 1 - D / (x1 x2*).
[[nodiscard]] double zd_voltage_fixed_input(double x1, const Equilibrium& eq, double D);

struct ZeroDynamicsReport {
    double current_slope_analytic{0.0}; ///< D / (x2*^2 (1 + x2*))
    double current_slope_fd{0.0};
    double voltage_slope_derived{0.0}; ///< 1 / x1*
    double voltage_slope_fd{0.0};
    double voltage_slope_printed{0.0}; ///< (x1* - D) / x1*^2
    double printed_value_at_equilibrium{0.0};
    bool printed_form_matches{false};
    std::string note;
};

[[nodiscard]] ZeroDynamicsReport zero_dynamics_report(const Equilibrium& eq, double D);

// ---------------------------------------------------------------------------
// Secondary equilibria

struct SearchBox {
    double x1_min{0.0};
    double x1_max{0.0};
    double x2_min{0.0};
    double x2_max{0.0};

    [[nodiscard]] bool contains(State x) const
    {
        return x.x1 >= x1_min && x.x1 <= x1_max && x.x2 >= x2_min && x.x2 <= x2_max;
    }
};

/// Box scaled to the equilibrium: x1 in [0.01 x1*, 5 x1* + 1], x2 in [0.01 x2*, 3 x2*].
[[nodiscard]] SearchBox default_saddle_box(const Equilibrium& eq);

using PlanarField = std::function<Vec2(State)>;

/// Central-difference Jacobian with step h * max(1, |coordinate|).
[[nodiscard]] Matrix2 fd_jacobian(const PlanarField& field, State x, double h = 1e-6);

struct Saddle {
    State state{};
    double field_norm{0.0};
    std::array<std::complex<double>, 2> eigenvalues{};
    double energy{0.0};
};

/// Zero of F_d grad H_d other than x* whose linearization has eigenvalues with
/// real parts of opposite sign. Grid scan (scan_resolution^2 cells) for sign
/// changes, then damped Newton with a finite-difference Jacobian down to
/// field norm 1e-12. Among several, the one with the lowest H_d is returned.
/// Throws NotFoundError when none exists in the box.
[[nodiscard]] Saddle find_saddle(const Equilibrium& eq, double D, double k1, double k2, const SearchBox& box,
                                 int scan_resolution = 200);

// ---------------------------------------------------------------------------
// Sublevel sets

enum class LimitingConstraint { saddle_level, orthant_boundary };

[[nodiscard]] const char* to_string(LimitingConstraint c);

/// H_d sampled on a uniform node grid.
struct LevelGrid {
    SearchBox box{};
    int n1{0}; ///< nodes along x1
    int n2{0}; ///< nodes along x2
    std::vector<double> values; ///< row-major, index j * n1 + i

    [[nodiscard]] double x1_at(int i) const { return box.x1_min + (box.x1_max - box.x1_min) * i / (n1 - 1); }
    [[nodiscard]] double x2_at(int j) const { return box.x2_min + (box.x2_max - box.x2_min) * j / (n2 - 1); }
    [[nodiscard]] double at(int i, int j) const { return values[static_cast<std::size_t>(j) * n1 + i]; }
};

[[nodiscard]] LevelGrid sample_energy_grid(const SearchBox& box, int resolution, double D, double k1, double k2);

struct SublevelEstimate {
    double c_star{0.0};
    double energy_at_equilibrium{0.0};
    std::optional<Saddle> saddle;
    LimitingConstraint limiting_constraint{LimitingConstraint::orthant_boundary};
    SearchBox box{};
    int grid_resolution{0};
    std::vector<std::string> warnings;
};

struct DomainOptions {
    int grid_resolution{400};
    std::optional<SearchBox> box; ///< default: x* +- 3 |x* - saddle|, clipped to the quadrant
    int saddle_scan_resolution{200};
};

/// Largest c (to grid resolution) whose sublevel component around x* stays
/// bounded, inside the open quadrant, and below the saddle level. Containment
/// is an 8-connected flood fill over grid nodes with H_d <= c; c is bisected
/// between H_d(x*) and H_d(saddle) and finally shrunk by one step.
[[nodiscard]] SublevelEstimate estimate_domain(const Equilibrium& eq, double D, double k1, double k2,
                                               const DomainOptions& options = {});

/// True when the flood-filled component of {H <= level} containing `seed`
/// avoids every edge of the grid.
[[nodiscard]] bool component_is_interior(const LevelGrid& grid, double level, State seed);

struct Polyline {
    std::vector<State> vertices;
    bool closed{false};
};

/// Marching-squares level curves of the grid.
[[nodiscard]] std::vector<Polyline> extract_contours(const LevelGrid& grid, double level);

/// Innermost closed contour of `level` enclosing `inside`, if any.
[[nodiscard]] std::optional<Polyline> enclosing_contour(const LevelGrid& grid, double level, State inside);

/// Even-odd point-in-polygon test on a closed polyline.
[[nodiscard]] bool polygon_contains(const Polyline& polygon, State x);

} // namespace bbcpl
