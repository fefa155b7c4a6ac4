#pragma once

// Immersion-and-invariance estimator of the normalized load power D:
//   D_hat   = -(gamma/2) x2^2 + d_i
//   d_i'    = gamma x1 x2 (1 - u) + (gamma^2 / 2) x2^2 - gamma d_i
// The error D_hat - D obeys e' = -gamma e for any input u(tau).

#include "bbcpl/model.hpp"

namespace bbcpl {

struct EstimatorState {
    double d_i{0.0};
    double gamma{1.0};

    /// Throws PreconditionError unless gamma > 0.
    void validate() const;
};

[[nodiscard]] double d_hat(double x2, const EstimatorState& s);

[[nodiscard]] double d_i_dot(State x, double u, const EstimatorState& s);

/// d_i such that d_hat(x2, {d_i, gamma}) == d_hat_value.
[[nodiscard]] double d_i_for_estimate(double d_hat_value, double x2, double gamma);

/// err0 * exp(-gamma tau).
[[nodiscard]] double predicted_error(double err0, double gamma, double tau);

} // namespace bbcpl
