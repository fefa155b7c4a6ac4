#include "bbcpl/estimator.hpp"

#include "bbcpl/errors.hpp"

#include <cmath>
#include <string>

namespace bbcpl {

void EstimatorState::validate() const
{
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw PreconditionError("adaptation gain must be positive, got " + std::to_string(gamma));
    }
}

double d_hat(double x2, const EstimatorState& s) { return -0.5 * s.gamma * x2 * x2 + s.d_i; }

double d_i_dot(State x, double u, const EstimatorState& s)
{
    const double g = s.gamma;
    return g * x.x1 * x.x2 * (1.0 - u) + 0.5 * g * g * x.x2 * x.x2 - g * s.d_i;
}

double d_i_for_estimate(double d_hat_value, double x2, double gamma) { return d_hat_value + 0.5 * gamma * x2 * x2; }

double predicted_error(double err0, double gamma, double tau) { return err0 * std::exp(-gamma * tau); }

} // namespace bbcpl
