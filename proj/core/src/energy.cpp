#include "bbcpl/energy.hpp"

#include "bbcpl/errors.hpp"
#include "bbcpl/roots.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace bbcpl {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kBoundAgreement = 1e-9;

void require_quadrant(State x, const char* who)
{
    if (!(x.x1 > 0.0 && x.x2 > 0.0) || !std::isfinite(x.x1) || !std::isfinite(x.x2)) {
        throw DomainError(std::string(who) + ": state outside the open positive quadrant");
    }
}

// Recurring subexpressions: S = 2 x1^2 + x2^2 and A = artanh(x1 / sqrt(x1^2 + x2^2/2)).
struct Common {
    double s;
    double sqrt_s;
    double a;
};

Common common(State x)
{
    const double s = 2.0 * x.x1 * x.x1 + x.x2 * x.x2;
    const double sqrt_s = std::sqrt(s);
    return {s, sqrt_s, std::atanh(kSqrt2 * x.x1 / sqrt_s)};
}

// k1 * (r*^2 + k2) at x* once k2 is chosen by compute_k2; independent of k1.
double stationary_offset(const Equilibrium& eq, double D)
{
    const State xs = eq.state();
    const auto [s, sqrt_s, a] = common(xs);
    return D * (1.0 + xs.x2) / (2.0 * xs.x1 * s) - kSqrt2 * D * a / (2.0 * s * sqrt_s);
}

} // namespace

Matrix2 f_d(State x)
{
    require_quadrant(x, "f_d");
    const double x1 = x.x1;
    const double x2 = x.x2;
    const double p = x2 + 1.0;
    return {-x2 / x1, -2.0 * x2 / p, 2.0 * x2 / p, -2.0 * x1 / (p * p)};
}

double hamiltonian(State x, double D, double k1, double k2)
{
    require_quadrant(x, "hamiltonian");
    const double x1 = x.x1;
    const double x2 = x.x2;
    const double r2 = x1 * x1 + 0.5 * x2 * x2;
    const double r = std::sqrt(r2);
    const double shaped = r2 + k2;
    return -0.5 * (x2 + kSqrt2 * D * std::atan(kSqrt2 * x1 / x2)) - D * std::atanh(x1 / r) / (2.0 * r)
           + 0.5 * k1 * shaped * shaped;
}

Vec2 grad(State x, double D, double k1, double k2)
{
    require_quadrant(x, "grad");
    const double x1 = x.x1;
    const double x2 = x.x2;
    const auto [s, sqrt_s, a] = common(x);
    const double s32 = s * sqrt_s;

    const double g1 = -D * (1.0 + x2) / s + k1 * x1 * (2.0 * (k2 + x1 * x1) + x2 * x2) + kSqrt2 * D * x1 * a / s32;
    const double g2 = (sqrt_s * (2.0 * D * x1 * (1.0 + x2)
                                 + x2 * s * (-1.0 + 2.0 * k1 * (k2 + x1 * x1) * x2 + k1 * x2 * x2 * x2))
                       + kSqrt2 * D * x2 * x2 * a)
                      / (2.0 * x2 * s32);
    return {g1, g2};
}

Matrix2 hessian(State x, double D, double k1, double k2)
{
    require_quadrant(x, "hessian");
    const double x1 = x.x1;
    const double x2 = x.x2;
    const double x1s = x1 * x1;
    const double x2s = x2 * x2;
    const auto [s, sqrt_s, a] = common(x);
    const double s2 = s * s;
    const double s3 = s2 * s;

    const double h11 = (s * (2.0 * D * x1 * (3.0 + 2.0 * x2) + k1 * s2 * (2.0 * k2 + 6.0 * x1s + x2s))
                        + kSqrt2 * D * (x2s - 4.0 * x1s) * sqrt_s * a)
                       / s3;
    const double h12 = (2.0 * k1 * x1 * x2s * s3
                        + D * (2.0 * x1s * x2s - 4.0 * x1s * x1s * (1.0 + x2) + x2s * x2s * (2.0 + x2))
                        - 3.0 * kSqrt2 * D * x1 * x2s * sqrt_s * a)
                       / (x2 * s3);
    const double h22 = (s * (k1 * (2.0 * (k2 + x1s) + 3.0 * x2s) * x2s * s2 - 4.0 * D * x1 * (x1s + x2s * (2.0 + x2)))
                        + 2.0 * kSqrt2 * D * (x1s - x2s) * x2s * sqrt_s * a)
                       / (2.0 * x2s * s3);
    return {h11, h12, h12, h22};
}

double compute_k2(const Equilibrium& eq, double D, double k1)
{
    if (k1 == 0.0) {
        throw PreconditionError("compute_k2: k1 must be nonzero");
    }
    const double x1 = eq.x1_star;
    const double x2 = eq.x2_star;
    return stationary_offset(eq, D) / k1 - 0.5 * x2 * x2 - x1 * x1;
}

double k1_prime_closed_form(const Equilibrium& eq, double D)
{
    const State xs = eq.state();
    require_quadrant(xs, "k1_prime");
    const double x1 = xs.x1;
    const double x2 = xs.x2;
    const auto [s, sqrt_s, a] = common(xs);
    const double x1c = x1 * x1 * x1;
    const double numerator = 6.0 * kSqrt2 * D * x1c * a / sqrt_s - D * (x2 * x2 * (1.0 + x2) + x1 * x1 * (8.0 + 6.0 * x2));
    return numerator / (4.0 * x1c * s * s);
}

double k1_prime_bracketed(const Equilibrium& eq, double D)
{
    const State xs = eq.state();
    return bracket_and_bisect([&](double k1) { return hessian(xs, D, k1, compute_k2(eq, D, k1)).a11; }, -1.0, 0.75);
}

double k1_prime(const Equilibrium& eq, double D)
{
    const double closed = k1_prime_closed_form(eq, D);
    const double bracketed = k1_prime_bracketed(eq, D);
    return std::abs(closed - bracketed) > kBoundAgreement ? bracketed : closed;
}

double h_factor(const Equilibrium& eq)
{
    const double x1 = eq.x1_star;
    const double x2 = eq.x2_star;
    const double x1p3 = x1 * x1 * x1;
    const double x1p5 = x1p3 * x1 * x1;
    const double x1p7 = x1p5 * x1 * x1;
    const double x2p2 = x2 * x2;
    const double x2p3 = x2p2 * x2;
    const double x2p4 = x2p2 * x2p2;
    const double x2p7 = x2p4 * x2p3;
    return 4.0 * x1p3 + 4.0 * x1p5 * x2p3 + 2.0 * x1p3 * x2p4 + x1 * x2p2 + x1 * x2p7 - 8.0 * x1p7
           - 4.0 * x1p5 * x2p2;
}

Matrix2 hessian_at_equilibrium_offset(const Equilibrium& eq, double D)
{
    const State xs = eq.state();
    // k1 = 0 leaves only the non-shaped part; the shaped part at x* contributes
    // c0 * diag(2, 1) + k1 v v^T.
    const double c0 = stationary_offset(eq, D);
    const Matrix2 base = hessian(xs, D, 0.0, 0.0);
    return base + Matrix2{2.0 * c0, 0.0, 0.0, c0};
}

double det_gain_slope(const Equilibrium& eq, double D)
{
    const Vec2 v{2.0 * eq.x1_star, eq.x2_star};
    return dot(v, hessian_at_equilibrium_offset(eq, D).adjugate() * v);
}

double det_gain_root(const Equilibrium& eq, double D)
{
    const double slope = det_gain_slope(eq, D);
    const double scale = 4.0 * eq.x1_star * eq.x1_star + eq.x2_star * eq.x2_star;
    if (std::abs(slope) <= 1e-12 * scale) {
        throw PreconditionError("det_gain_root: determinant does not depend on k1 at this equilibrium");
    }
    return -hessian_at_equilibrium_offset(eq, D).det() / slope;
}

double k1_double_prime_closed_form(const Equilibrium& eq, double D)
{
    const double slope = det_gain_slope(eq, D);
    const double scale = 4.0 * eq.x1_star * eq.x1_star + eq.x2_star * eq.x2_star;
    if (!(slope > 1e-12 * scale)) {
        throw PreconditionError("k1_double_prime: the determinant is not increasing in k1 at this "
                                "equilibrium (slope " + std::to_string(slope) + "); no lower bound exists");
    }
    return -hessian_at_equilibrium_offset(eq, D).det() / slope;
}

double k1_double_prime_bracketed(const Equilibrium& eq, double D)
{
    const State xs = eq.state();
    return bracket_and_bisect([&](double k1) { return hessian(xs, D, k1, compute_k2(eq, D, k1)).det(); }, -1.0,
                              0.75);
}

double k1_double_prime(const Equilibrium& eq, double D)
{
    const double closed = k1_double_prime_closed_form(eq, D);
    const double bracketed = k1_double_prime_bracketed(eq, D);
    return std::abs(closed - bracketed) > kBoundAgreement ? bracketed : closed;
}

GainSet make_gain_set(const Equilibrium& eq, double D, double k1)
{
    GainSet gains{k1, compute_k2(eq, D, k1), k1_prime(eq, D), k1_double_prime(eq, D)};
    if (!gains.satisfies_bound()) {
        throw PreconditionError("k1 = " + std::to_string(k1) + " does not exceed max(k1', k1'') = "
                                + std::to_string(gains.lower_bound()));
    }
    return gains;
}

double pde_residual(State x, double D, Vec2 gradient)
{
    return -x.x2 * gradient.v1 + 2.0 * x.x1 * gradient.v2 - (D - x.x1 + D / x.x2);
}

double pde_residual(State x, double D, double k1, double k2) { return pde_residual(x, D, grad(x, D, k1, k2)); }

} // namespace bbcpl
