#include "bbcpl/sim.hpp"

#include "bbcpl/energy.hpp"
#include "bbcpl/estimator.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace bbcpl {

const char* to_string(ControllerKind kind)
{
    switch (kind) {
    case ControllerKind::ida:
        return "ida";
    case ControllerKind::adaptive_ida:
        return "adaptive_ida";
    case ControllerKind::pd:
        return "pd";
    case ControllerKind::open_loop:
        return "open_loop";
    }
    return "unknown";
}

double raw_control(const ControllerSpec& spec, State x, double D_ctrl, double tau)
{
    switch (spec.kind) {
    case ControllerKind::ida:
    case ControllerKind::adaptive_ida: {
        const Equilibrium eq = equilibrium_for(spec.x2_star, D_ctrl);
        return ida_control(x, D_ctrl, spec.k1, compute_k2(eq, D_ctrl, spec.k1));
    }
    case ControllerKind::pd:
        return pd_control(x, equilibrium_for(spec.x2_star, D_ctrl), spec.pd);
    case ControllerKind::open_loop:
        if (!spec.open_loop_input) {
            throw PreconditionError("open_loop controller without an input signal");
        }
        return spec.open_loop_input(tau);
    }
    throw PreconditionError("unknown controller kind");
}

Vec2 closed_loop_field(State x, const ControllerSpec& spec, double D)
{
    return vector_field(x, clamp_duty(raw_control(spec, x, D)), D);
}

void Scenario::validate() const
{
    if (!(step > 0.0)) {
        throw PreconditionError("step must be positive");
    }
    if (!(duration >= 0.0) || (duration > 0.0 && duration < step)) {
        throw PreconditionError("duration must be zero or at least one step");
    }
    if (d_schedule.empty() || d_schedule.front().tau != 0.0) {
        throw PreconditionError("load schedule must start at tau = 0");
    }
    for (std::size_t i = 0; i < d_schedule.size(); ++i) {
        if (!(d_schedule[i].D > 0.0)) {
            throw PreconditionError("scheduled D values must be positive");
        }
        if (i > 0 && !(d_schedule[i].tau > d_schedule[i - 1].tau)) {
            throw PreconditionError("schedule times must be strictly increasing");
        }
    }
    if (!initial_state.in_open_quadrant()) {
        throw PreconditionError("initial state must lie in the open positive quadrant");
    }
    if (estimates_load() && !(gamma > 0.0)) {
        throw PreconditionError("adaptation gain must be positive");
    }
    if (controller.kind == ControllerKind::open_loop && !controller.open_loop_input) {
        throw PreconditionError("open_loop scenario needs an input signal");
    }
}

std::size_t Trajectory::saturation_count() const
{
    std::size_t n = 0;
    for (const Sample& s : samples) {
        n += s.saturated ? 1 : 0;
    }
    return n;
}

namespace {

using Augmented = std::array<double, 3>; // x1, x2, d_i

} // namespace

Trajectory simulate(const Scenario& s)
{
    s.validate();
    Trajectory traj;
    const auto n_steps = static_cast<long>(std::llround(s.duration / s.step));
    if (n_steps == 0) {
        return traj;
    }

    // Step index from which each schedule entry is active.
    std::vector<long> switch_index;
    switch_index.reserve(s.d_schedule.size());
    for (const auto& e : s.d_schedule) {
        switch_index.push_back(std::llround(e.tau / s.step));
    }
    std::size_t segment = 0;
    auto advance_segment = [&](long k) {
        while (segment + 1 < s.d_schedule.size() && switch_index[segment + 1] <= k) {
            ++segment;
        }
    };

    const bool estimating = s.estimates_load();
    const double gamma = s.gamma;
    double d_i0 = 0.0;
    if (estimating) {
        d_i0 = s.d_i_init ? *s.d_i_init
                          : d_i_for_estimate(s.d_hat_init.value_or(s.d_schedule.front().D), s.initial_state.x2, gamma);
    }
    Augmented y{s.initial_state.x1, s.initial_state.x2, d_i0};
    traj.samples.reserve(static_cast<std::size_t>(n_steps) + 1);

    double D_true = s.d_schedule.front().D;
    auto controller_load = [&](const Augmented& yy) {
        return estimating ? d_hat(yy[1], {yy[2], gamma}) : D_true;
    };
    auto check_state = [&](const Augmented& yy) {
        if (!(yy[1] >= kSingularityFloor)) {
            throw SingularityError("x2 fell below the singularity floor");
        }
        if (!(yy[0] > 0.0)) {
            throw SingularityError("x1 left the open positive quadrant");
        }
    };
    const std::function<Augmented(double, const Augmented&)> field = [&](double tau, const Augmented& yy) {
        check_state(yy);
        const State x{yy[0], yy[1]};
        const double u = clamp_duty(raw_control(s.controller, x, controller_load(yy), tau));
        const Vec2 dx = vector_field(x, u, D_true);
        const double ddi = estimating ? d_i_dot(x, u, {yy[2], gamma}) : 0.0;
        return Augmented{dx.v1, dx.v2, ddi};
    };

    for (long k = 0;; ++k) {
        const double tau = static_cast<double>(k) * s.step;
        advance_segment(k);
        D_true = s.d_schedule[segment].D;
        try {
            check_state(y);
            for (double v : y) {
                if (!std::isfinite(v)) {
                    throw IntegrationError("state is not finite");
                }
            }
            const State x{y[0], y[1]};
            const double D_ctrl = controller_load(y);
            Sample sample;
            sample.tau = tau;
            sample.x1 = y[0];
            sample.x2 = y[1];
            sample.d_true = D_true;
            sample.u_raw = raw_control(s.controller, x, D_ctrl, tau);
            sample.u_applied = clamp_duty(sample.u_raw);
            sample.saturated = sample.u_applied != sample.u_raw;
            if (estimating) {
                sample.d_hat = D_ctrl;
            }
            if (s.controller.kind == ControllerKind::ida || s.controller.kind == ControllerKind::adaptive_ida) {
                const Equilibrium eq = equilibrium_for(s.controller.x2_star, D_ctrl);
                sample.h_d = hamiltonian(x, D_ctrl, s.controller.k1, compute_k2(eq, D_ctrl, s.controller.k1));
            }
            traj.samples.push_back(sample);
            if (k == n_steps) {
                break;
            }
            y = rk4_step<3>(field, tau, y, s.step);
        } catch (const SingularityError& e) {
            traj.event = SimEvent::singularity;
            traj.event_tau = tau;
            traj.event_message = e.what();
            break;
        } catch (const DomainError& e) {
            traj.event = SimEvent::singularity;
            traj.event_tau = tau;
            traj.event_message = e.what();
            break;
        } catch (const IntegrationError& e) {
            traj.event = SimEvent::non_finite;
            traj.event_tau = tau;
            traj.event_message = e.what();
            break;
        }
    }
    return traj;
}

std::string format_number(double value)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

void write_csv(std::ostream& out, const Trajectory& trajectory)
{
    out << "tau,x1,x2,u_applied,u_raw,d_true,d_hat,h_d,saturated\n";
    for (const Sample& s : trajectory.samples) {
        out << format_number(s.tau) << ',' << format_number(s.x1) << ',' << format_number(s.x2) << ','
            << format_number(s.u_applied) << ',' << format_number(s.u_raw) << ',' << format_number(s.d_true) << ','
            << (s.d_hat ? format_number(*s.d_hat) : "") << ',' << (s.h_d ? format_number(*s.h_d) : "") << ','
            << (s.saturated ? 1 : 0) << '\n';
    }
    if (!trajectory.complete()) {
        out << "# event: " << (trajectory.event == SimEvent::singularity ? "singularity" : "non_finite")
            << " at tau=" << format_number(trajectory.event_tau) << ": " << trajectory.event_message << '\n';
    }
}

} // namespace bbcpl
