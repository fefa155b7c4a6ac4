#include "config.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace bbcpl::cli {

namespace {

using nlohmann::json;

// Wraps one JSON object: rejects unknown keys up front, then hands out typed fields.
class Obj {
public:
    Obj(const json& j, std::string path, std::initializer_list<const char*> allowed) : j_(j), path_(std::move(path))
    {
        if (!j.is_object()) {
            fail(path_, "expected an object");
        }
        const std::set<std::string> keys(allowed.begin(), allowed.end());
        for (const auto& [key, value] : j.items()) {
            if (keys.count(key) == 0) {
                fail(path_, "unknown key '" + key + "'");
            }
        }
    }

    [[noreturn]] static void fail(const std::string& path, const std::string& what)
    {
        throw ConfigError((path.empty() ? std::string("config") : path) + ": " + what);
    }

    [[nodiscard]] bool has(const char* key) const { return j_.contains(key); }
    [[nodiscard]] const json& at(const char* key) const { return j_.at(key); }
    [[nodiscard]] std::string sub(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

    [[nodiscard]] double number(const char* key) const
    {
        const json& v = j_.at(key);
        if (!v.is_number() || !std::isfinite(v.get<double>())) {
            fail(sub(key), "expected a finite number");
        }
        return v.get<double>();
    }
    void number(const char* key, double& out) const
    {
        if (has(key)) {
            out = number(key);
        }
    }
    void positive(const char* key, double& out) const
    {
        if (has(key)) {
            out = number(key);
            if (!(out > 0.0)) {
                fail(sub(key), "must be positive");
            }
        }
    }
    void integer(const char* key, int& out, int min_value) const
    {
        if (!has(key)) {
            return;
        }
        const json& v = j_.at(key);
        if (!v.is_number_integer() || v.get<long long>() < min_value || v.get<long long>() > 1'000'000) {
            fail(sub(key), "expected an integer in [" + std::to_string(min_value) + ", 1000000]");
        }
        out = v.get<int>();
    }
    void boolean(const char* key, bool& out) const
    {
        if (!has(key)) {
            return;
        }
        if (!j_.at(key).is_boolean()) {
            fail(sub(key), "expected true or false");
        }
        out = j_.at(key).get<bool>();
    }
    void string(const char* key, std::string& out) const
    {
        if (!has(key)) {
            return;
        }
        if (!j_.at(key).is_string()) {
            fail(sub(key), "expected a string");
        }
        out = j_.at(key).get<std::string>();
    }

private:
    const json& j_;
    std::string path_;
};

std::vector<double> numbers(const json& v, const std::string& path, std::size_t exact = 0)
{
    if (!v.is_array()) {
        Obj::fail(path, "expected an array of numbers");
    }
    std::vector<double> out;
    for (const json& e : v) {
        if (!e.is_number() || !std::isfinite(e.get<double>())) {
            Obj::fail(path, "expected an array of finite numbers");
        }
        out.push_back(e.get<double>());
    }
    if (exact != 0 && out.size() != exact) {
        Obj::fail(path, "expected exactly " + std::to_string(exact) + " numbers");
    }
    return out;
}

void range(const Obj& o, const char* key, double& lo, double& hi)
{
    if (!o.has(key)) {
        return;
    }
    const auto r = numbers(o.at(key), o.sub(key), 2);
    if (!(r[0] < r[1])) {
        Obj::fail(o.sub(key), "range must be increasing");
    }
    lo = r[0];
    hi = r[1];
}

State state_from(const json& v, const std::string& path)
{
    const auto x = numbers(v, path, 2);
    if (!(x[0] > 0.0 && x[1] > 0.0)) {
        Obj::fail(path, "state must lie in the open positive quadrant");
    }
    return {x[0], x[1]};
}

ControllerKind kind_from(const std::string& name, const std::string& path)
{
    for (ControllerKind k :
         {ControllerKind::ida, ControllerKind::adaptive_ida, ControllerKind::pd, ControllerKind::open_loop}) {
        if (name == to_string(k)) {
            return k;
        }
    }
    Obj::fail(path, "unknown controller kind '" + name + "' (ida, adaptive_ida, pd, open_loop)");
}

void parse_controller(const json& j, const std::string& path, ControllerSpec& spec, OpenLoopInput& input)
{
    const Obj o(j, path, {"kind", "x2_star", "k1", "pd", "open_loop"});
    if (o.has("kind")) {
        std::string name;
        o.string("kind", name);
        spec.kind = kind_from(name, o.sub("kind"));
    }
    o.positive("x2_star", spec.x2_star);
    o.number("k1", spec.k1);
    if (o.has("pd")) {
        const Obj pd(o.at("pd"), o.sub("pd"), {"kp", "kd"});
        pd.number("kp", spec.pd.kp);
        pd.number("kd", spec.pd.kd);
    }
    if (o.has("open_loop")) {
        const Obj ol(o.at("open_loop"), o.sub("open_loop"), {"u0", "amplitude", "omega"});
        ol.number("u0", input.u0);
        ol.number("amplitude", input.amplitude);
        ol.number("omega", input.omega);
        if (std::abs(input.amplitude) > std::min(input.u0, 1.0 - input.u0)) {
            Obj::fail(o.sub("open_loop"), "u0 +- amplitude must stay within [0, 1]");
        }
    }
    if (spec.k1 == 0.0 && (spec.kind == ControllerKind::ida || spec.kind == ControllerKind::adaptive_ida)) {
        Obj::fail(o.sub("k1"), "IDA-PBC needs a nonzero k1");
    }
    const OpenLoopInput copy = input;
    spec.open_loop_input = [copy](double tau) { return copy.u0 + copy.amplitude * std::sin(copy.omega * tau); };
}

ScenarioConfig parse_scenario(const json& j, const std::string& path, const RunConfig& cfg)
{
    const Obj o(j, path,
                {"name", "controller", "initial_state", "duration", "step", "gamma", "d_hat_init", "d_i_init",
                 "d_schedule"});
    ScenarioConfig sc;
    o.string("name", sc.name);
    if (sc.name.empty() || sc.name.find_first_of("/\\") != std::string::npos) {
        Obj::fail(o.sub("name"), "must be a nonempty file stem without path separators");
    }
    Scenario& s = sc.scenario;
    s.controller = cfg.controller;
    OpenLoopInput input = cfg.open_loop;
    if (o.has("controller")) {
        parse_controller(o.at("controller"), o.sub("controller"), s.controller, input);
    }
    if (!o.has("initial_state")) {
        Obj::fail(path, "missing 'initial_state'");
    }
    s.initial_state = state_from(o.at("initial_state"), o.sub("initial_state"));
    o.number("duration", s.duration);
    if (s.duration < 0.0) {
        Obj::fail(o.sub("duration"), "must be nonnegative");
    }
    o.positive("step", s.step);
    o.positive("gamma", s.gamma);
    if (o.has("d_hat_init")) {
        s.d_hat_init = o.number("d_hat_init");
    }
    if (o.has("d_i_init")) {
        s.d_i_init = o.number("d_i_init");
    }
    s.d_schedule = {{0.0, cfg.D}};
    if (o.has("d_schedule")) {
        const json& arr = o.at("d_schedule");
        if (!arr.is_array() || arr.empty()) {
            Obj::fail(o.sub("d_schedule"), "expected a nonempty array");
        }
        s.d_schedule.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string p = o.sub("d_schedule") + "[" + std::to_string(i) + "]";
            const Obj e(arr[i], p, {"tau", "D", "scale"});
            if (e.has("D") == e.has("scale")) {
                Obj::fail(p, "give exactly one of 'D' and 'scale'");
            }
            ScheduleEntry entry;
            entry.tau = e.number("tau");
            entry.D = e.has("D") ? e.number("D") : e.number("scale") * cfg.D;
            s.d_schedule.push_back(entry);
        }
    }
    try {
        s.validate();
    } catch (const std::exception& ex) {
        Obj::fail(path, ex.what());
    }
    return sc;
}

void parse_box(const json& j, const std::string& path, SearchBox& box)
{
    const Obj o(j, path, {"x1", "x2"});
    range(o, "x1", box.x1_min, box.x1_max);
    range(o, "x2", box.x2_min, box.x2_max);
}

} // namespace

RunConfig parse_config(const std::string& json_text)
{
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: not valid JSON: ") + e.what());
    }
    const Obj o(root, "", {"plant", "D", "controller", "scenarios", "phase", "region", "zerodyn", "verify"});
    RunConfig cfg;

    if (o.has("plant") == o.has("D")) {
        Obj::fail("", "give exactly one of 'plant' and 'D'");
    }
    if (o.has("plant")) {
        const Obj p(o.at("plant"), "plant", {"L", "C", "E", "P"});
        PhysicalParams pp;
        for (const char* key : {"L", "C", "E", "P"}) {
            if (!p.has(key)) {
                Obj::fail("plant", std::string("missing '") + key + "'");
            }
        }
        p.positive("L", pp.L);
        p.positive("C", pp.C);
        p.positive("E", pp.E);
        p.positive("P", pp.P);
        cfg.plant = pp;
        cfg.D = normalize(pp).D;
    } else {
        o.positive("D", cfg.D);
    }

    if (o.has("controller")) {
        parse_controller(o.at("controller"), "controller", cfg.controller, cfg.open_loop);
    } else {
        parse_controller(json::object(), "controller", cfg.controller, cfg.open_loop);
    }

    if (o.has("scenarios")) {
        const json& arr = o.at("scenarios");
        if (!arr.is_array()) {
            Obj::fail("scenarios", "expected an array");
        }
        std::set<std::string> names;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            cfg.scenarios.push_back(parse_scenario(arr[i], "scenarios[" + std::to_string(i) + "]", cfg));
            if (!names.insert(cfg.scenarios.back().name).second) {
                Obj::fail("scenarios[" + std::to_string(i) + "].name", "duplicate scenario name");
            }
        }
    }

    if (o.has("phase")) {
        const Obj p(o.at("phase"), "phase",
                    {"grid", "initial_states", "duration", "step", "levels", "include_c_star", "contour_resolution"});
        PhaseConfig& ph = cfg.phase;
        if (p.has("grid")) {
            const Obj g(p.at("grid"), "phase.grid", {"x1", "x2", "n1", "n2"});
            range(g, "x1", ph.grid.box.x1_min, ph.grid.box.x1_max);
            range(g, "x2", ph.grid.box.x2_min, ph.grid.box.x2_max);
            g.integer("n1", ph.grid.n1, 2);
            g.integer("n2", ph.grid.n2, 2);
            if (!(ph.grid.box.x1_min > 0.0 && ph.grid.box.x2_min > 0.0)) {
                Obj::fail("phase.grid", "must lie in the open positive quadrant");
            }
        }
        if (p.has("initial_states")) {
            const json& arr = p.at("initial_states");
            if (!arr.is_array()) {
                Obj::fail("phase.initial_states", "expected an array of [x1, x2] pairs");
            }
            for (std::size_t i = 0; i < arr.size(); ++i) {
                ph.initial_states.push_back(state_from(arr[i], "phase.initial_states[" + std::to_string(i) + "]"));
            }
        }
        p.number("duration", ph.duration);
        if (ph.duration < 0.0) {
            Obj::fail("phase.duration", "must be nonnegative");
        }
        p.positive("step", ph.step);
        if (p.has("levels")) {
            ph.levels = numbers(p.at("levels"), "phase.levels");
        }
        p.boolean("include_c_star", ph.include_c_star);
        p.integer("contour_resolution", ph.contour_resolution, 3);
    }

    if (o.has("region")) {
        const Obj r(o.at("region"), "region", {"grid_resolution", "saddle_scan_resolution", "box"});
        r.integer("grid_resolution", cfg.region.grid_resolution, 3);
        r.integer("saddle_scan_resolution", cfg.region.saddle_scan_resolution, 2);
        if (r.has("box")) {
            SearchBox box{};
            parse_box(r.at("box"), "region.box", box);
            if (!(box.x1_min > 0.0 && box.x2_min > 0.0)) {
                Obj::fail("region.box", "must lie in the open positive quadrant");
            }
            cfg.region.box = box;
        }
    }

    if (o.has("zerodyn")) {
        const Obj z(o.at("zerodyn"), "zerodyn", {"x1", "x2", "points"});
        range(z, "x1", cfg.zerodyn.x1_min, cfg.zerodyn.x1_max);
        range(z, "x2", cfg.zerodyn.x2_min, cfg.zerodyn.x2_max);
        z.integer("points", cfg.zerodyn.points, 2);
        if (!(cfg.zerodyn.x1_min > 0.0 && cfg.zerodyn.x2_min > 0.0)) {
            Obj::fail("zerodyn", "ranges must be positive");
        }
    }

    if (o.has("verify")) {
        const Obj v(o.at("verify"), "verify", {"samples", "seed", "k2_offset", "range"});
        int samples = static_cast<int>(cfg.verify.samples);
        v.integer("samples", samples, 1);
        cfg.verify.samples = static_cast<std::size_t>(samples);
        if (v.has("seed")) {
            if (!v.at("seed").is_number_unsigned()) {
                Obj::fail("verify.seed", "expected a nonnegative integer");
            }
            cfg.verify.seed = v.at("seed").get<std::uint64_t>();
        }
        v.number("k2_offset", cfg.verify.k2_offset);
        range(v, "range", cfg.verify.lo, cfg.verify.hi);
        if (!(cfg.verify.lo > 0.0)) {
            Obj::fail("verify.range", "must be positive");
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

} // namespace bbcpl::cli
