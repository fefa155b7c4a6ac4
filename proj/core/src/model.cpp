#include "bbcpl/model.hpp"

#include "bbcpl/errors.hpp"

#include <cmath>
#include <string>

namespace bbcpl {

namespace {

void require_positive(double value, const char* what)
{
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError(std::string(what) + " must be positive and finite, got " + std::to_string(value));
    }
}

} // namespace

void PhysicalParams::validate() const
{
    require_positive(L, "L");
    require_positive(C, "C");
    require_positive(E, "E");
    require_positive(P, "P");
}

NormalizedParams normalize(const PhysicalParams& p)
{
    p.validate();
    return {p.P / (p.E * p.E) * std::sqrt(p.L / p.C)};
}

double load_power(double D, const PhysicalParams& p)
{
    return D * p.E * p.E / std::sqrt(p.L / p.C);
}

State to_normalized(double i, double v, const PhysicalParams& p)
{
    require_positive(i, "inductor current");
    require_positive(v, "output voltage");
    return {std::sqrt(p.L / p.C) * i / p.E, v / p.E};
}

PhysicalState from_normalized(State x, const PhysicalParams& p)
{
    return {x.x1 * p.E * std::sqrt(p.C / p.L), x.x2 * p.E};
}

double tau_of_t(double t, const PhysicalParams& p) { return t / std::sqrt(p.L * p.C); }

double t_of_tau(double tau, const PhysicalParams& p) { return tau * std::sqrt(p.L * p.C); }

Vec2 drift(State x, double D) { return {-x.x2, x.x1 - D / x.x2}; }

Vec2 input_vector(State x) { return {x.x2 + 1.0, -x.x1}; }

Vec2 vector_field(State x, double u, double D)
{
    if (!(u >= 0.0 && u <= 1.0)) {
        throw PreconditionError("duty ratio outside [0, 1]: " + std::to_string(u));
    }
    if (!(x.x2 >= kSingularityFloor)) {
        throw SingularityError("x2 below singularity floor: " + std::to_string(x.x2));
    }
    const double on = 1.0 - u;
    return {-on * x.x2 + u, on * x.x1 - D / x.x2};
}

Equilibrium equilibrium_for(double x2_star, double D)
{
    require_positive(x2_star, "x2_star");
    require_positive(D, "D");
    return {D / x2_star + D, x2_star, x2_star / (1.0 + x2_star)};
}

double assignability_residual(State x, double D) { return x.x1 - D / x.x2 - D; }

} // namespace bbcpl
