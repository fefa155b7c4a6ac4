#include "bbcpl/controllers.hpp"

#include "bbcpl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace bbcpl {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

} // namespace

Vec2 ida_target_field(State x, double D, double k1, double k2) { return f_d(x) * grad(x, D, k1, k2); }

double ida_control(State x, double D, double k1, double k2)
{
    const Vec2 g = input_vector(x);
    const Vec2 residual = ida_target_field(x, D, k1, k2) - drift(x, D);
    return dot(g, residual) / dot(g, g);
}

ClosedFormTerms ida_closed_form_terms(State x, const Equilibrium& eq, double D, double k1, Transcription t)
{
    if (!x.in_open_quadrant()) {
        throw DomainError("ida_control_closed_form: state outside the open positive quadrant");
    }
    const double k2 = compute_k2(eq, D, k1);
    const double x1 = x.x1;
    const double x2 = x.x2;
    const double s = 2.0 * x1 * x1 + x2 * x2;
    const double sqrt_s = std::sqrt(s);
    const double s32 = s * sqrt_s;
    const double a = std::atanh(x1 / std::sqrt(x1 * x1 + 0.5 * x2 * x2));

    ClosedFormTerms terms;
    terms.denominator = x1 * x1 + (x2 + 1.0) * (x2 + 1.0);
    terms.open_loop = x2 * (x2 + 1.0) + x1 * (x1 - D / x2);
    terms.coupling_1 = -(x2 * (x2 + 1.0) / x1 + 2.0 * x1 * x2 / (x2 + 1.0));
    const double shaped = 2.0 * (k2 + x1 * x1) + x2 * x2;
    const double load = D * (1.0 + x2) / s;
    if (t == Transcription::literal) {
        terms.gradient_1 = k1 * x1 * (shaped - load) + kSqrt2 * D * x1 * a / s32;
    } else {
        terms.gradient_1 = k1 * x1 * shaped - load + kSqrt2 * D * x1 * a / s32;
    }
    terms.coupling_2 = 2.0 * x1 * x1 / ((x2 + 1.0) * (x2 + 1.0)) - 2.0 * x2;
    terms.gradient_2 = (sqrt_s * (2.0 * D * x1 * (1.0 + x2)
                                  + x2 * s * (-1.0 + 2.0 * k1 * x2 * (k2 + x1 * x1) + k1 * x2 * x2 * x2))
                        + kSqrt2 * D * x2 * x2 * a)
                       / (2.0 * x2 * s32);
    return terms;
}

ClosedFormTerms ida_generic_terms(State x, double D, double k1, double k2)
{
    const Vec2 g = input_vector(x);
    const Matrix2 fd = f_d(x);
    const Vec2 gh = grad(x, D, k1, k2);
    const Vec2 f = drift(x, D);
    ClosedFormTerms terms;
    terms.denominator = dot(g, g);
    terms.open_loop = -dot(g, f);
    // g^T F_d as a row vector.
    terms.coupling_1 = g.v1 * fd.a11 + g.v2 * fd.a21;
    terms.coupling_2 = g.v1 * fd.a12 + g.v2 * fd.a22;
    terms.gradient_1 = gh.v1;
    terms.gradient_2 = gh.v2;
    return terms;
}

double ida_control_closed_form(State x, const Equilibrium& eq, double D, double k1, Transcription t)
{
    return ida_closed_form_terms(x, eq, D, k1, t).value();
}

ClosedFormDiscrepancy compare_closed_form(const std::vector<State>& points, const Equilibrium& eq, double D,
                                          double k1, double tolerance)
{
    const double k2 = compute_k2(eq, D, k1);
    ClosedFormDiscrepancy report;
    for (const State& x : points) {
        const double generic = ida_control(x, D, k1, k2);
        const double literal = ida_control_closed_form(x, eq, D, k1, Transcription::literal);
        const double corrected = ida_control_closed_form(x, eq, D, k1, Transcription::corrected);
        const double diff = std::abs(literal - generic);
        report.corrected_max_abs_difference = std::max(report.corrected_max_abs_difference,
                                                       std::abs(corrected - generic));
        if (diff > report.max_abs_difference || std::isnan(diff)) {
            report.max_abs_difference = diff;
            report.worst_point = x;
            report.literal_value = literal;
            report.generic_value = generic;
            report.corrected_value = corrected;
        }
    }
    report.agrees = report.max_abs_difference <= tolerance;
    if (!report.agrees) {
        const ClosedFormTerms lit = ida_closed_form_terms(report.worst_point, eq, D, k1, Transcription::literal);
        const ClosedFormTerms gen = ida_generic_terms(report.worst_point, D, k1, k2);
        const std::pair<const char*, std::pair<double, double>> order[] = {
            {"open_loop g^T(-f)", {lit.open_loop, gen.open_loop}},
            {"coupling_1 (g^T F_d)_1", {lit.coupling_1, gen.coupling_1}},
            {"gradient_1 dH_d/dx1", {lit.gradient_1, gen.gradient_1}},
            {"coupling_2 (g^T F_d)_2", {lit.coupling_2, gen.coupling_2}},
            {"gradient_2 dH_d/dx2", {lit.gradient_2, gen.gradient_2}},
        };
        for (const auto& [name, values] : order) {
            if (std::abs(values.first - values.second) > tolerance) {
                report.first_divergent_term = name;
                break;
            }
        }
        if (report.first_divergent_term.empty()) {
            report.first_divergent_term = "denominator or term combination";
        }
    }
    return report;
}

double pd_control(State x, const Equilibrium& eq, const PdGains& gains)
{
    return eq.u_star + gains.kp * (x.x1 - eq.x1_star) + gains.kd * (x.x2 - eq.x2_star);
}

Matrix2 pd_jacobian(const Equilibrium& eq, double D, const PdGains& gains)
{
    const double x2 = eq.x2_star;
    const double kp = gains.kp;
    const double kd = gains.kd;
    return {kp * (1.0 + x2), kd + kd * x2 - 1.0 / (1.0 + x2), 1.0 / (1.0 + x2) - D * kp * (1.0 + x2) / x2,
            -D * (-1.0 + kd * x2 * (1.0 + x2)) / (x2 * x2)};
}

StabilityCone pd_stability_cone(const Equilibrium& eq, double D)
{
    const double x2 = eq.x2_star;
    return {x2 / D, 1.0 / (x2 + x2 * x2), D / (x2 * x2), 1.0 / ((1.0 + x2) * (1.0 + x2))};
}

bool pd_is_hurwitz(const PdGains& gains, const StabilityCone& cone)
{
    return cone.m2 * gains.kp + cone.b2 > gains.kd && gains.kd > cone.m1 * gains.kp + cone.b1;
}

} // namespace bbcpl
