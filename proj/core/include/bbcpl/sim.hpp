#pragma once

// Fixed-step RK4 simulation of the normalized converter under IDA-PBC,
// adaptive IDA-PBC, PD, or an open-loop input, with piecewise-constant load
// schedules and the load estimator carried in the same state vector.

#include "bbcpl/controllers.hpp"
#include "bbcpl/errors.hpp"
#include "bbcpl/model.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bbcpl {

/// One classical Runge-Kutta step of y' = f(t, y). Throws SingularityError if
/// any stage derivative is not finite.
template <std::size_t N>
[[nodiscard]] std::array<double, N> rk4_step(
    const std::function<std::array<double, N>(double, const std::array<double, N>&)>& field, double t,
    const std::array<double, N>& y, double h)
{
    if (!(h > 0.0)) {
        throw PreconditionError("rk4_step: step must be positive");
    }
    auto checked = [&](double tt, const std::array<double, N>& yy) {
        auto d = field(tt, yy);
        for (double v : d) {
            if (!std::isfinite(v)) {
                throw SingularityError("rk4_step: non-finite derivative");
            }
        }
        return d;
    };
    auto shifted = [&](const std::array<double, N>& k, double scale) {
        std::array<double, N> out{};
        for (std::size_t i = 0; i < N; ++i) {
            out[i] = y[i] + scale * k[i];
        }
        return out;
    };
    const auto k1 = checked(t, y);
    const auto k2 = checked(t + 0.5 * h, shifted(k1, 0.5 * h));
    const auto k3 = checked(t + 0.5 * h, shifted(k2, 0.5 * h));
    const auto k4 = checked(t + h, shifted(k3, h));
    std::array<double, N> next{};
    for (std::size_t i = 0; i < N; ++i) {
        next[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return next;
}

/// Autonomous overload.
template <std::size_t N>
[[nodiscard]] std::array<double, N> rk4_step(const std::function<std::array<double, N>(const std::array<double, N>&)>& field,
                                             const std::array<double, N>& y, double h)
{
    const std::function<std::array<double, N>(double, const std::array<double, N>&)> timed =
        [&](double, const std::array<double, N>& yy) { return field(yy); };
    return rk4_step<N>(timed, 0.0, y, h);
}

enum class ControllerKind { ida, adaptive_ida, pd, open_loop };

[[nodiscard]] const char* to_string(ControllerKind kind);

/// Controller description, independent of the plant parameter it is fed.
struct ControllerSpec {
    ControllerKind kind{ControllerKind::ida};
    double x2_star{4.0};
    double k1{0.01};
    PdGains pd{};
    std::function<double(double tau)> open_loop_input; ///< open_loop only
};

/// Raw duty ratio at x when the controller believes the load is D_ctrl.
/// x1* and k2 are derived from D_ctrl on every call.
[[nodiscard]] double raw_control(const ControllerSpec& spec, State x, double D_ctrl, double tau = 0.0);

[[nodiscard]] inline double clamp_duty(double u) { return u < 0.0 ? 0.0 : (u > 1.0 ? 1.0 : u); }

/// f(x) + g(x) clamp(u(x)); the controller sees the true D.
[[nodiscard]] Vec2 closed_loop_field(State x, const ControllerSpec& spec, double D);

struct ScheduleEntry {
    double tau{0.0};
    double D{0.0};
};

struct Scenario {
    ControllerSpec controller{};
    State initial_state{};
    double gamma{1.0};                ///< adaptive and open_loop
    std::optional<double> d_hat_init; ///< default: the first scheduled D
    std::optional<double> d_i_init;   ///< overrides d_hat_init when set
    std::vector<ScheduleEntry> d_schedule;
    double duration{0.0};
    double step{1e-3};

    /// Throws PreconditionError on a malformed scenario.
    void validate() const;
    [[nodiscard]] bool estimates_load() const
    {
        return controller.kind == ControllerKind::adaptive_ida || controller.kind == ControllerKind::open_loop;
    }
};

struct Sample {
    double tau{0.0};
    double x1{0.0};
    double x2{0.0};
    double u_applied{0.0};
    double u_raw{0.0};
    double d_true{0.0};
    std::optional<double> d_hat;
    std::optional<double> h_d;
    bool saturated{false};
};

enum class SimEvent { none, singularity, non_finite };

struct Trajectory {
    std::vector<Sample> samples;
    SimEvent event{SimEvent::none};
    double event_tau{0.0};
    std::string event_message;

    [[nodiscard]] bool complete() const { return event == SimEvent::none; }
    [[nodiscard]] std::size_t saturation_count() const;
};

/// Integrates the scenario. Samples are at tau = k * step, k = 0..N with
/// N = round(duration / step); a zero duration yields no samples. Schedule
/// switches are snapped to the nearest step boundary. Numerical events end the
/// record early instead of throwing.
[[nodiscard]] Trajectory simulate(const Scenario& s);

/// CSV with header tau,x1,x2,u_applied,u_raw,d_true,d_hat,h_d,saturated;
/// 12 significant digits; missing optional values are empty fields. A numerical
/// event is appended as a trailing '#' comment line.
void write_csv(std::ostream& out, const Trajectory& trajectory);

/// Formats a double with 12 significant digits.
[[nodiscard]] std::string format_number(double value);

} // namespace bbcpl
