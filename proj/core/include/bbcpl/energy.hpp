#pragma once

// Desired closed-loop energy H_d, the interconnection/damping matrix F_d, and
// the gain bounds that make x* a strict minimum of H_d.
//
// The energy is
//   H_d = -(x2 + sqrt2 D atan(sqrt2 x1 / x2)) / 2
//         - D artanh(x1 / r) / (2 r)
//         + k1/2 (r^2 + k2)^2,          r^2 = x1^2 + x2^2 / 2,
// which solves -x2 dH/dx1 + 2 x1 dH/dx2 = D - x1 + D/x2 for every k1, k2.

#include "bbcpl/linalg.hpp"
#include "bbcpl/model.hpp"

namespace bbcpl {

/// IDA-PBC tuning. For a validated set k1 > max(k1_prime, k1_double_prime).
struct GainSet {
    double k1{0.0};
    double k2{0.0};
    double k1_prime{0.0};
    double k1_double_prime{0.0};

    [[nodiscard]] double lower_bound() const { return k1_prime > k1_double_prime ? k1_prime : k1_double_prime; }
    [[nodiscard]] bool satisfies_bound() const { return k1 > lower_bound(); }
};

/// Interconnection and damping matrix; its symmetric part is negative definite
/// on the open quadrant.
[[nodiscard]] Matrix2 f_d(State x);

[[nodiscard]] double hamiltonian(State x, double D, double k1, double k2);
[[nodiscard]] Vec2 grad(State x, double D, double k1, double k2);
[[nodiscard]] Matrix2 hessian(State x, double D, double k1, double k2);

/// k2 that makes x* a critical point of H_d. Throws PreconditionError for k1 == 0.
[[nodiscard]] double compute_k2(const Equilibrium& eq, double D, double k1);

/// Threshold on k1 for the (1,1) Hessian entry at x* to be positive.
[[nodiscard]] double k1_prime_closed_form(const Equilibrium& eq, double D);
/// Same threshold located by bisection on hessian(x*)(1,1) with k2 = compute_k2(k1).
[[nodiscard]] double k1_prime_bracketed(const Equilibrium& eq, double D);
/// Closed form, replaced by the bracketed value if the two differ by more than 1e-9.
[[nodiscard]] double k1_prime(const Equilibrium& eq, double D);

/// Diagnostic polynomial h(x*) associated with the determinant bound.
/// Kept as a reported diagnostic; it is not the sign of the k1 slope of det.
[[nodiscard]] double h_factor(const Equilibrium& eq);

/// With k2 = compute_k2(k1), the Hessian at x* is M0 + k1 v v^T where
/// v = (2 x1*, x2*). This returns M0.
[[nodiscard]] Matrix2 hessian_at_equilibrium_offset(const Equilibrium& eq, double D);

/// d det(Hessian at x*) / d k1 = v^T adj(M0) v (det is affine in k1).
[[nodiscard]] double det_gain_slope(const Equilibrium& eq, double D);

/// k1 where det(Hessian at x*) = 0, whichever direction the slope has.
/// Throws PreconditionError when the slope vanishes.
[[nodiscard]] double det_gain_root(const Equilibrium& eq, double D);

/// Lower bound on k1 from det(Hessian at x*) > 0. Requires det_gain_slope > 0
/// (otherwise the inequality flips and PreconditionError is thrown).
[[nodiscard]] double k1_double_prime_closed_form(const Equilibrium& eq, double D);
/// Same threshold by bisection on det(hessian(x*, k1, compute_k2(k1))).
[[nodiscard]] double k1_double_prime_bracketed(const Equilibrium& eq, double D);
[[nodiscard]] double k1_double_prime(const Equilibrium& eq, double D);

/// Assembles and validates a GainSet; PreconditionError if k1 violates the bound.
[[nodiscard]] GainSet make_gain_set(const Equilibrium& eq, double D, double k1);

/// -x2 g1 + 2 x1 g2 - (D - x1 + D/x2) with (g1, g2) = grad(x, ...).
[[nodiscard]] double pde_residual(State x, double D, double k1, double k2);

/// Same operator applied to an arbitrary gradient.
[[nodiscard]] double pde_residual(State x, double D, Vec2 gradient);

} // namespace bbcpl
