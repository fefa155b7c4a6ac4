#pragma once

// State-feedback laws: IDA-PBC (generic synthesis and its expanded closed
// form) and the PD baseline with its linearized stability test.
//
// All laws return the raw, unclamped duty ratio.

#include "bbcpl/energy.hpp"
#include "bbcpl/linalg.hpp"
#include "bbcpl/model.hpp"

#include <array>
#include <vector>
#include <string>

namespace bbcpl {

struct PdGains {
    double kp{0.0};
    double kd{0.0};
};

/// Stability region m2 kp + b2 > kd > m1 kp + b1 of the linearized PD loop.
struct StabilityCone {
    double m1{0.0};
    double b1{0.0};
    double m2{0.0};
    double b2{0.0};
};

/// u = (g^T g)^{-1} g^T (F_d grad H_d - f). Makes f + g u == F_d grad H_d
/// wherever H_d solves the matching equation.
[[nodiscard]] double ida_control(State x, double D, double k1, double k2);

/// Closed-loop field of the IDA law without clamping: F_d(x) grad H_d(x).
[[nodiscard]] Vec2 ida_target_field(State x, double D, double k1, double k2);

/// Which grouping of the expanded IDA-PBC expression to evaluate.
enum class Transcription {
    literal,   ///< as commonly printed: D(1+x2)/S sits inside the k1 x1 (...) factor
    corrected, ///< D(1+x2)/S regrouped as a separate gradient term
};

/// The five factors of the expanded law
///   u = [ n0 + c1 * t1 + c2 * t2 ] / (x1^2 + (x2 + 1)^2)
/// n0 = g^T(-f), c = g^T F_d, t = gradient components.
struct ClosedFormTerms {
    double open_loop{0.0};   ///< n0
    double coupling_1{0.0};  ///< c1
    double gradient_1{0.0};  ///< t1
    double coupling_2{0.0};  ///< c2
    double gradient_2{0.0};  ///< t2
    double denominator{0.0};

    [[nodiscard]] double value() const
    {
        return (open_loop + coupling_1 * gradient_1 + coupling_2 * gradient_2) / denominator;
    }
};

/// Factors of the expanded law; k2 is recomputed internally from (eq, D, k1).
[[nodiscard]] ClosedFormTerms ida_closed_form_terms(State x, const Equilibrium& eq, double D, double k1,
                                                    Transcription t = Transcription::literal);

/// The same factors as produced by the generic synthesis path.
[[nodiscard]] ClosedFormTerms ida_generic_terms(State x, double D, double k1, double k2);

[[nodiscard]] double ida_control_closed_form(State x, const Equilibrium& eq, double D, double k1,
                                             Transcription t = Transcription::literal);

/// Outcome of comparing the expanded law against the generic synthesis.
struct ClosedFormDiscrepancy {
    bool agrees{true};
    double max_abs_difference{0.0};
    State worst_point{};
    std::string first_divergent_term; ///< empty when agrees
    double literal_value{0.0};        ///< at worst_point
    double generic_value{0.0};
    double corrected_value{0.0};
    double corrected_max_abs_difference{0.0};
};

/// Evaluates both paths on the given points. Terms are compared in evaluation
/// order (n0, c1, t1, c2, t2) and the first one differing by more than
/// `tolerance` at the worst point is named.
[[nodiscard]] ClosedFormDiscrepancy compare_closed_form(const std::vector<State>& points, const Equilibrium& eq,
                                                        double D, double k1, double tolerance = 1e-9);

/// u = u* + kp (x1 - x1*) + kd (x2 - x2*).
[[nodiscard]] double pd_control(State x, const Equilibrium& eq, const PdGains& gains);

/// Jacobian of the PD closed loop at the equilibrium.
[[nodiscard]] Matrix2 pd_jacobian(const Equilibrium& eq, double D, const PdGains& gains);

[[nodiscard]] StabilityCone pd_stability_cone(const Equilibrium& eq, double D);

/// Strict two-sided cone test; boundary points are not stable.
[[nodiscard]] bool pd_is_hurwitz(const PdGains& gains, const StabilityCone& cone);

} // namespace bbcpl
