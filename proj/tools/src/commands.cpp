#include "commands.hpp"

#include "bbcpl/analysis.hpp"
#include "bbcpl/controllers.hpp"
#include "bbcpl/energy.hpp"
#include "bbcpl/errors.hpp"
#include "bbcpl/estimator.hpp"
#include "bbcpl/sim.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace bbcpl::cli {

namespace {

using Doc = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::ofstream open_output(const Options& opt, const std::string& file)
{
    fs::create_directories(opt.out_dir);
    std::ofstream f(opt.out_dir / file);
    if (!f) {
        throw ConfigError("cannot write '" + (opt.out_dir / file).string() + "'");
    }
    return f;
}

void write_document(const Doc& doc, const Options& opt, const std::string& file, std::ostream& out)
{
    const std::string text = doc.dump(2) + "\n";
    open_output(opt, file) << text;
    out << text;
}

bool uses_energy(ControllerKind k) { return k == ControllerKind::ida || k == ControllerKind::adaptive_ida; }

Doc state_doc(State x) { return Doc::array({x.x1, x.x2}); }

Doc saddle_doc(const Saddle& s)
{
    Doc d;
    d["x1"] = s.state.x1;
    d["x2"] = s.state.x2;
    d["energy"] = s.energy;
    d["field_norm"] = s.field_norm;
    d["eigenvalues"] = Doc::array({s.eigenvalues[0].real(), s.eigenvalues[1].real()});
    return d;
}

Doc box_doc(const SearchBox& b)
{
    Doc d;
    d["x1"] = Doc::array({b.x1_min, b.x1_max});
    d["x2"] = Doc::array({b.x2_min, b.x2_max});
    return d;
}

// --------------------------------------------------------------------------
// verify

struct Property {
    std::string name;
    double worst;
    double limit;
};

double central(const std::function<double(double)>& f, double x)
{
    const double h = 1e-6 * std::max(1.0, std::abs(x));
    const double c1 = (f(x + h) - f(x - h)) / (2.0 * h);
    const double c2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
    return (4.0 * c2 - c1) / 3.0;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

std::vector<Property> run_properties(const RunConfig& cfg, const std::vector<State>& pts)
{
    const double D = cfg.D;
    const Equilibrium eq = cfg.equilibrium();
    const double k1 = cfg.controller.k1;
    const double k2_exact = compute_k2(eq, D, k1);
    const double k2 = k2_exact + cfg.verify.k2_offset;
    std::vector<Property> props;

    // model
    double eq_res = std::abs(assignability_residual(eq.state(), D)) + vector_field(eq.state(), eq.u_star, D).norm();
    props.push_back({"model.equilibrium_is_stationary", eq_res, 1e-12});
    if (cfg.plant) {
        double worst = 0.0;
        for (const State& x : pts) {
            const PhysicalState p = from_normalized(x, *cfg.plant);
            const State back = to_normalized(p.i, p.v, *cfg.plant);
            worst = std::max({worst, rel(back.x1, x.x1), rel(back.x2, x.x2)});
        }
        props.push_back({"model.coordinate_round_trip", worst, 1e-12});
    }

    // energy
    double pde = 0.0, g_err = 0.0, h_err = 0.0, fd_sym = -1e300;
    for (const State& x : pts) {
        pde = std::max(pde, std::abs(pde_residual(x, D, k1, k2)));
        const Vec2 g = grad(x, D, k1, k2);
        const Matrix2 h = hessian(x, D, k1, k2);
        g_err = std::max(g_err, rel(g.v1, central([&](double s) { return hamiltonian({s, x.x2}, D, k1, k2); }, x.x1)));
        g_err = std::max(g_err, rel(g.v2, central([&](double s) { return hamiltonian({x.x1, s}, D, k1, k2); }, x.x2)));
        h_err = std::max(h_err, rel(h.a11, central([&](double s) { return grad({s, x.x2}, D, k1, k2).v1; }, x.x1)));
        h_err = std::max(h_err, rel(h.a12, central([&](double s) { return grad({x.x1, s}, D, k1, k2).v1; }, x.x2)));
        h_err = std::max(h_err, rel(h.a22, central([&](double s) { return grad({x.x1, s}, D, k1, k2).v2; }, x.x2)));
        const Matrix2 sym = f_d(x).symmetric_part();
        fd_sym = std::max({fd_sym, sym.a11, -sym.det()});
    }
    props.push_back({"energy.pde_residual", pde, 1e-8});
    props.push_back({"energy.gradient_vs_finite_difference", g_err, 1e-6});
    props.push_back({"energy.hessian_vs_finite_difference", h_err, 1e-5});
    props.push_back({"energy.f_d_dissipative", fd_sym, 0.0});
    props.push_back({"energy.gradient_at_equilibrium", grad(eq.state(), D, k1, k2).norm(), 1e-10});
    props.push_back({"energy.k1_prime_closed_form_vs_bracketed",
                     std::abs(k1_prime_closed_form(eq, D) - k1_prime_bracketed(eq, D)), 1e-9});
    if (det_gain_slope(eq, D) > 0.0) {
        props.push_back({"energy.k1_double_prime_closed_form_vs_bracketed",
                         std::abs(k1_double_prime_closed_form(eq, D) - k1_double_prime_bracketed(eq, D)), 1e-9});
    }

    // controllers
    double match = 0.0, closed = 0.0;
    for (const State& x : pts) {
        const double u = ida_control(x, D, k1, k2);
        match = std::max(match, (drift(x, D) + u * input_vector(x) - ida_target_field(x, D, k1, k2)).norm());
        if (cfg.verify.k2_offset == 0.0) {
            closed = std::max(closed, std::abs(ida_control_closed_form(x, eq, D, k1, Transcription::corrected) - u));
        }
    }
    props.push_back({"controllers.matching_identity", match, 1e-10});
    if (cfg.verify.k2_offset == 0.0) {
        props.push_back({"controllers.expanded_law_regrouped", closed, 1e-9});
    }
    {
        const StabilityCone cone = pd_stability_cone(eq, D);
        std::mt19937_64 rng(cfg.verify.seed);
        std::uniform_real_distribution<double> kp(-3.0, 1.0), kd(-20.0, 5.0);
        double mismatches = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const PdGains g{kp(rng), kd(rng)};
            const auto ev = pd_jacobian(eq, D, g).eigenvalues();
            const bool stable = ev[0].real() < 0.0 && ev[1].real() < 0.0;
            mismatches += stable != pd_is_hurwitz(g, cone) ? 1.0 : 0.0;
        }
        props.push_back({"controllers.pd_cone_matches_eigenvalues", mismatches, 0.0});
    }

    // estimator
    {
        std::mt19937_64 rng(cfg.verify.seed + 1);
        std::uniform_real_distribution<double> duty(0.0, 1.0), gamma(0.1, 10.0), di(-5.0, 5.0);
        double worst = 0.0;
        for (const State& x : pts) {
            const double u = duty(rng);
            const EstimatorState s{di(rng), gamma(rng)};
            const double rate = -s.gamma * x.x2 * vector_field(x, u, D).v2 + d_i_dot(x, u, s);
            const double e = d_hat(x.x2, s) - D;
            worst = std::max(worst, std::abs(rate + s.gamma * e) / std::max(1.0, std::abs(s.gamma * e)));
        }
        props.push_back({"estimator.error_rate_identity", worst, 1e-10});
    }

    // analysis
    {
        const ZeroDynamicsReport r = zero_dynamics_report(eq, D);
        props.push_back({"analysis.zero_dynamics_current_slope",
                         std::abs(r.current_slope_fd - r.current_slope_analytic) / r.current_slope_analytic, 1e-6});
        props.push_back({"analysis.zero_dynamics_voltage_slope",
                         std::abs(r.voltage_slope_fd - r.voltage_slope_derived) / r.voltage_slope_derived, 1e-6});
    }

    // sim: short IDA run from a point near x*, energy must not increase
    if (cfg.verify.k2_offset == 0.0) {
        Scenario s;
        s.controller = cfg.controller;
        s.controller.kind = ControllerKind::ida;
        s.initial_state = {eq.x1_star * 0.9, eq.x2_star * 0.97};
        s.d_schedule = {{0.0, D}};
        s.duration = 10.0;
        s.step = 1e-3;
        const Trajectory tr = simulate(s);
        double rise = tr.complete() ? 0.0 : 1.0;
        for (std::size_t k = 1; k < tr.samples.size(); ++k) {
            rise = std::max(rise, *tr.samples[k].h_d - *tr.samples[k - 1].h_d);
        }
        props.push_back({"sim.energy_nonincreasing", rise, 1e-9});
    }
    return props;
}

} // namespace

// --------------------------------------------------------------------------

int cmd_gains(const RunConfig& cfg, const Options& opt, std::ostream& out)
{
    const double D = cfg.D;
    const Equilibrium eq = cfg.equilibrium();
    const double k1 = cfg.controller.k1;
    Doc d;
    d["D"] = D;
    d["x1_star"] = eq.x1_star;
    d["x2_star"] = eq.x2_star;
    d["u_star"] = eq.u_star;
    d["k1"] = k1;
    d["k2"] = k1 != 0.0 ? Doc(compute_k2(eq, D, k1)) : Doc(nullptr);

    const double kp = k1_prime(eq, D);
    d["k1_prime"] = {{"value", kp}, {"closed_form", k1_prime_closed_form(eq, D)},
                     {"bracketed", k1_prime_bracketed(eq, D)}};
    const double slope = det_gain_slope(eq, D);
    Doc notes = Doc::array();
    double bound = kp;
    if (slope > 0.0) {
        const double kpp = k1_double_prime(eq, D);
        d["k1_double_prime"] = {{"value", kpp},
                                {"closed_form", k1_double_prime_closed_form(eq, D)},
                                {"bracketed", k1_double_prime_bracketed(eq, D)},
                                {"det_slope", slope},
                                {"h_factor", h_factor(eq)}};
        bound = std::max(kp, kpp);
    } else {
        const double root = det_gain_root(eq, D);
        d["k1_double_prime"] = {{"value", nullptr},
                                {"det_root", root},
                                {"det_slope", slope},
                                {"h_factor", h_factor(eq)}};
        notes.push_back("det(Hessian at x*) decreases with k1 here, so it is positive only for k1 < " +
                        format_number(root) + "; there is no lower bound from the determinant");
    }
    d["lower_bound"] = bound;
    const bool ok = k1 > bound && (slope > 0.0 || k1 < det_gain_root(eq, D));
    d["k1_admissible"] = ok;

    const StabilityCone c = pd_stability_cone(eq, D);
    d["pd_cone"] = {{"m1", c.m1}, {"b1", c.b1}, {"m2", c.m2}, {"b2", c.b2}};
    d["pd_gains"] = {{"kp", cfg.controller.pd.kp},
                     {"kd", cfg.controller.pd.kd},
                     {"hurwitz", pd_is_hurwitz(cfg.controller.pd, c)}};
    notes.push_back("b1 = 1/(x2* (1 + x2*)) = " + format_number(c.b1) +
                    "; the intercept 0.0588 quoted for x2* = 4 does not follow from this expression (it gives 0.05)");
    notes.push_back("k1'' is the root in k1 of det(Hessian of H_d at x*) with k2 = k2(k1)");
    d["notes"] = notes;
    write_document(d, opt, "gains.json", out);
    return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, const Options& opt, std::ostream& out)
{
    if (cfg.scenarios.empty()) {
        throw ConfigError("scenarios: at least one scenario is required for simulate");
    }
    if (opt.physical && !cfg.plant) {
        throw ConfigError("--physical needs 'plant' parameters, not a bare 'D'");
    }
    int code = kExitOk;
    for (const ScenarioConfig& sc : cfg.scenarios) {
        const Trajectory tr = simulate(sc.scenario);
        {
            std::ofstream f = open_output(opt, sc.name + ".csv");
            write_csv(f, tr);
        }
        if (opt.physical) {
            const PhysicalParams& p = *cfg.plant;
            std::ofstream f = open_output(opt, sc.name + "_physical.csv");
            f << "t,i,v,u_applied,u_raw,p_true,p_hat,saturated\n";
            for (const Sample& s : tr.samples) {
                const PhysicalState ps = from_normalized({s.x1, s.x2}, p);
                f << format_number(t_of_tau(s.tau, p)) << ',' << format_number(ps.i) << ',' << format_number(ps.v)
                  << ',' << format_number(s.u_applied) << ',' << format_number(s.u_raw) << ','
                  << format_number(load_power(s.d_true, p)) << ','
                  << (s.d_hat ? format_number(load_power(*s.d_hat, p)) : "") << ',' << (s.saturated ? 1 : 0) << '\n';
            }
        }
        out << sc.name << ": " << tr.samples.size() << " samples";
        if (!tr.samples.empty()) {
            const Sample& last = tr.samples.back();
            out << ", final (" << format_number(last.x1) << ", " << format_number(last.x2) << ") at tau "
                << format_number(last.tau);
        }
        out << ", " << tr.saturation_count() << " saturated";
        if (!tr.complete()) {
            out << ", stopped: " << tr.event_message << " at tau " << format_number(tr.event_tau);
            code = kExitNumericalEvent;
        }
        out << '\n';
    }
    return code;
}

int cmd_phase(const RunConfig& cfg, const Options& opt, std::ostream& out)
{
    const PhaseConfig& ph = cfg.phase;
    const double D = cfg.D;
    const Equilibrium eq = cfg.equilibrium();
    Doc summary;
    summary["equilibrium"] = state_doc(eq.state());

    {
        std::ofstream f = open_output(opt, "phase_grid.csv");
        f << "x1,x2,u_raw,u_applied,dx1,dx2\n";
        const SearchBox& b = ph.grid.box;
        for (int j = 0; j < ph.grid.n2; ++j) {
            for (int i = 0; i < ph.grid.n1; ++i) {
                const State x{b.x1_min + (b.x1_max - b.x1_min) * i / (ph.grid.n1 - 1),
                              b.x2_min + (b.x2_max - b.x2_min) * j / (ph.grid.n2 - 1)};
                const double u = raw_control(cfg.controller, x, D);
                const Vec2 f_x = vector_field(x, clamp_duty(u), D);
                f << format_number(x.x1) << ',' << format_number(x.x2) << ',' << format_number(u) << ','
                  << format_number(clamp_duty(u)) << ',' << format_number(f_x.v1) << ',' << format_number(f_x.v2)
                  << '\n';
            }
        }
    }

    int code = kExitOk;
    Doc trajectories = Doc::array();
    for (std::size_t k = 0; k < ph.initial_states.size(); ++k) {
        Scenario s;
        s.controller = cfg.controller;
        s.initial_state = ph.initial_states[k];
        s.d_schedule = {{0.0, D}};
        s.duration = ph.duration;
        s.step = ph.step;
        const Trajectory tr = simulate(s);
        const std::string file = "phase_traj_" + std::to_string(k) + ".csv";
        std::ofstream f = open_output(opt, file);
        write_csv(f, tr);
        Doc t;
        t["file"] = file;
        t["initial_state"] = state_doc(s.initial_state);
        t["complete"] = tr.complete();
        if (!tr.samples.empty()) {
            t["final_state"] = state_doc({tr.samples.back().x1, tr.samples.back().x2});
        }
        trajectories.push_back(t);
        if (!tr.complete()) {
            code = kExitNumericalEvent;
        }
    }
    summary["trajectories"] = trajectories;

    if (uses_energy(cfg.controller.kind)) {
        const double k1 = cfg.controller.k1;
        const double k2 = compute_k2(eq, D, k1);
        const SublevelEstimate est = estimate_domain(eq, D, k1, k2, cfg.region);
        summary["energy_at_equilibrium"] = est.energy_at_equilibrium;
        summary["c_star"] = est.c_star;
        summary["limiting_constraint"] = to_string(est.limiting_constraint);
        summary["saddle"] = est.saddle ? saddle_doc(*est.saddle) : Doc(nullptr);

        std::vector<std::pair<double, std::string>> levels;
        for (double c : ph.levels) {
            levels.emplace_back(c, "config");
        }
        if (ph.include_c_star) {
            levels.emplace_back(est.c_star, "c_star");
        }
        const LevelGrid grid = sample_energy_grid(est.box, ph.contour_resolution, D, k1, k2);
        std::ofstream f = open_output(opt, "phase_contours.csv");
        f << "level,source,vertex,x1,x2\n";
        Doc contour_docs = Doc::array();
        for (const auto& [level, source] : levels) {
            const auto poly = enclosing_contour(grid, level, eq.state());
            Doc c;
            c["level"] = level;
            c["source"] = source;
            c["closed"] = poly.has_value();
            if (poly) {
                double min1 = poly->vertices.front().x1;
                double min2 = poly->vertices.front().x2;
                for (std::size_t v = 0; v < poly->vertices.size(); ++v) {
                    const State& p = poly->vertices[v];
                    min1 = std::min(min1, p.x1);
                    min2 = std::min(min2, p.x2);
                    f << format_number(level) << ',' << source << ',' << v << ',' << format_number(p.x1) << ','
                      << format_number(p.x2) << '\n';
                }
                c["vertices"] = poly->vertices.size();
                c["min_x1"] = min1;
                c["min_x2"] = min2;
            }
            contour_docs.push_back(c);
        }
        summary["contours"] = contour_docs;
        summary["warnings"] = est.warnings;
    }
    write_document(summary, opt, "phase_summary.json", out);
    return code;
}

int cmd_verify(const RunConfig& cfg_in, const Options& opt, std::ostream& out)
{
    RunConfig cfg = cfg_in;
    if (opt.seed) {
        cfg.verify.seed = *opt.seed;
    }
    if (opt.samples) {
        cfg.verify.samples = *opt.samples;
    }
    std::mt19937_64 rng(cfg.verify.seed);
    std::uniform_real_distribution<double> coord(cfg.verify.lo, cfg.verify.hi);
    std::vector<State> pts(cfg.verify.samples);
    for (State& x : pts) {
        x.x1 = coord(rng);
        x.x2 = coord(rng);
    }

    const std::vector<Property> props = run_properties(cfg, pts);
    bool all = true;
    Doc list = Doc::array();
    for (const Property& p : props) {
        const bool pass = p.worst <= p.limit && std::isfinite(p.worst);
        all = all && pass;
        list.push_back({{"name", p.name}, {"pass", pass}, {"worst", p.worst}, {"limit", p.limit}});
    }
    Doc d;
    d["passed"] = all;
    d["samples"] = cfg.verify.samples;
    d["seed"] = cfg.verify.seed;
    d["k2_offset"] = cfg.verify.k2_offset;
    d["properties"] = list;

    const ClosedFormDiscrepancy r = compare_closed_form(pts, cfg.equilibrium(), cfg.D, cfg.controller.k1);
    Doc disc;
    disc["agrees"] = r.agrees;
    disc["max_abs_difference"] = r.max_abs_difference;
    if (!r.agrees) {
        disc["worst_point"] = state_doc(r.worst_point);
        disc["first_divergent_term"] = r.first_divergent_term;
        disc["printed_value"] = r.literal_value;
        disc["generic_value"] = r.generic_value;
        disc["regrouped_value"] = r.corrected_value;
        disc["regrouped_max_abs_difference"] = r.corrected_max_abs_difference;
    }
    d["expanded_law_as_printed"] = disc;
    write_document(d, opt, "verify.json", out);
    return all ? kExitOk : kExitVerificationFailed;
}

int cmd_zerodyn(const RunConfig& cfg, const Options& opt, std::ostream& out)
{
    const double D = cfg.D;
    const Equilibrium eq = cfg.equilibrium();
    const ZeroDynConfig& z = cfg.zerodyn;
    {
        std::ofstream f = open_output(opt, "zerodyn_current.csv");
        f << "x2,s,u_hold\n";
        for (int k = 0; k < z.points; ++k) {
            const double x2 = z.x2_min + (z.x2_max - z.x2_min) * k / (z.points - 1);
            f << format_number(x2) << ',' << format_number(zd_current_fixed(x2, eq, D)) << ','
              << format_number(zd_current_fixed_input(x2)) << '\n';
        }
    }
    {
        std::ofstream f = open_output(opt, "zerodyn_voltage.csv");
        f << "x1,w,w_printed,u_hold\n";
        for (int k = 0; k < z.points; ++k) {
            const double x1 = z.x1_min + (z.x1_max - z.x1_min) * k / (z.points - 1);
            f << format_number(x1) << ',' << format_number(zd_voltage_fixed(x1, eq, D)) << ','
              << format_number(zd_voltage_fixed_printed(x1, eq, D)) << ','
              << format_number(zd_voltage_fixed_input(x1, eq, D)) << '\n';
        }
    }
    const ZeroDynamicsReport r = zero_dynamics_report(eq, D);
    Doc d;
    d["equilibrium"] = state_doc(eq.state());
    d["current_fixed"] = {{"slope", r.current_slope_analytic}, {"slope_fd", r.current_slope_fd}};
    d["voltage_fixed"] = {{"slope", r.voltage_slope_derived},
                          {"slope_fd", r.voltage_slope_fd},
                          {"printed_slope", r.voltage_slope_printed},
                          {"printed_value_at_equilibrium", r.printed_value_at_equilibrium},
                          {"printed_form_matches", r.printed_form_matches}};
    d["note"] = r.note;
    write_document(d, opt, "zerodyn.json", out);
    return kExitOk;
}

int cmd_region(const RunConfig& cfg, const Options& opt, std::ostream& out)
{
    const double D = cfg.D;
    const Equilibrium eq = cfg.equilibrium();
    const double k1 = cfg.controller.k1;
    const double k2 = compute_k2(eq, D, k1);
    const SublevelEstimate est = estimate_domain(eq, D, k1, k2, cfg.region);
    Doc d;
    d["D"] = D;
    d["equilibrium"] = state_doc(eq.state());
    d["k1"] = k1;
    d["k2"] = k2;
    d["energy_at_equilibrium"] = est.energy_at_equilibrium;
    d["c_star"] = est.c_star;
    d["limiting_constraint"] = to_string(est.limiting_constraint);
    d["saddle"] = est.saddle ? saddle_doc(*est.saddle) : Doc(nullptr);
    d["box"] = box_doc(est.box);
    d["grid_resolution"] = est.grid_resolution;
    d["warnings"] = est.warnings;
    write_document(d, opt, "region.json", out);
    return kExitOk;
}

int run_command(const std::string& name, const std::string& config_path, const Options& opt, std::ostream& out,
                std::ostream& err)
{
    try {
        const RunConfig cfg = load_config(config_path);
        if (name == "gains") {
            return cmd_gains(cfg, opt, out);
        }
        if (name == "simulate") {
            return cmd_simulate(cfg, opt, out);
        }
        if (name == "phase") {
            return cmd_phase(cfg, opt, out);
        }
        if (name == "verify") {
            return cmd_verify(cfg, opt, out);
        }
        if (name == "zerodyn") {
            return cmd_zerodyn(cfg, opt, out);
        }
        if (name == "region") {
            return cmd_region(cfg, opt, out);
        }
        err << "error: unknown command '" << name << "'\n";
        return kExitConfigError;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const PreconditionError& e) {
        err << "invalid parameters: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const DomainError& e) {
        err << "invalid parameters: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const SingularityError& e) {
        err << "numerical event: " << e.what() << '\n';
        return kExitNumericalEvent;
    } catch (const IntegrationError& e) {
        err << "numerical event: " << e.what() << '\n';
        return kExitNumericalEvent;
    } catch (const NotFoundError& e) {
        err << "numerical event: " << e.what() << '\n';
        return kExitNumericalEvent;
    } catch (const fs::filesystem_error& e) {
        err << "output error: " << e.what() << '\n';
        return kExitConfigError;
    }
}

} // namespace bbcpl::cli
