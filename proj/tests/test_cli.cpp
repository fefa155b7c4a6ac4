#include "doctest.h"

#include "oracle_constants.hpp"

#include "commands.hpp"
#include "config.hpp"
#include "json.hpp"

#include "bbcpl/analysis.hpp"
#include "bbcpl/energy.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace bbcpl;
using namespace bbcpl::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* const kReferencePlant = R"("plant": {"L": 470e-6, "C": 500e-6, "E": 10.0, "P": 61.25})";

struct Workspace {
    fs::path dir;

    Workspace()
    {
        static int counter = 0;
        dir = fs::temp_directory_path() / ("bbcpl_cli_test_" + std::to_string(::getpid()) + "_" +
                                           std::to_string(counter++));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Workspace() { fs::remove_all(dir); }

    [[nodiscard]] std::string config(const std::string& body) const
    {
        const fs::path p = dir / "config.json";
        std::ofstream(p) << body;
        return p.string();
    }

    [[nodiscard]] Options options() const
    {
        Options o;
        o.out_dir = dir / "out";
        return o;
    }

    [[nodiscard]] std::string read(const std::string& file) const
    {
        std::ifstream in(dir / "out" / file);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }
};

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(const std::string& cmd, const std::string& config_path, const Options& opt)
{
    std::ostringstream out, err;
    const int code = run_command(cmd, config_path, opt, out, err);
    return {code, out.str(), err.str()};
}

std::string reference_config(const std::string& extra = "")
{
    return std::string("{") + kReferencePlant + R"(, "controller": {"x2_star": 4.0, "k1": 0.01, "pd": {"kp": -0.4, "kd": -1.5}})" +
           extra + "}";
}

} // namespace

TEST_CASE("gains report for the reference plant")
{
    Workspace w;
    const Result r = run("gains", w.config(reference_config()), w.options());
    REQUIRE(r.code == kExitOk);
    const json d = json::parse(w.read("gains.json"));
    CHECK(d["D"].get<double>() == doctest::Approx(0.59384).epsilon(1e-4));
    CHECK(d["x1_star"].get<double>() == doctest::Approx(0.7423).epsilon(1e-4));
    CHECK(std::abs(d["k1_prime"]["value"].get<double>() + 0.1205) <= 1e-3);
    CHECK(d["k1_double_prime"]["value"].get<double>() ==
          doctest::Approx(oracle::kK1DoublePrimeReference).epsilon(1e-9));
    CHECK(d["k2"].get<double>() == doctest::Approx(oracle::kK2Reference).epsilon(1e-12));
    CHECK(d["pd_cone"]["b1"].get<double>() == doctest::Approx(0.05));
    CHECK(d["pd_gains"]["hurwitz"].get<bool>());
    CHECK(d["k1_admissible"].get<bool>());
    CHECK(d["notes"].size() >= 1);
    // Key order is stable.
    CHECK(d.begin().key() == "D");
    CHECK(r.out == w.read("gains.json"));
}

TEST_CASE("gains report for the unit equilibrium")
{
    Workspace w;
    const Result r = run("gains", w.config(R"({"D": 1.0, "controller": {"x2_star": 1.0}})"), w.options());
    REQUIRE(r.code == kExitOk);
    const json d = json::parse(w.read("gains.json"));
    CHECK(d["pd_cone"]["m1"].get<double>() == 1.0);
    CHECK(d["pd_cone"]["b1"].get<double>() == 0.5);
    CHECK(d["pd_cone"]["m2"].get<double>() == 1.0);
    CHECK(d["pd_cone"]["b2"].get<double>() == 0.25);
    CHECK(d["k1_double_prime"]["value"].is_null());
    CHECK(d["k1_double_prime"]["det_root"].get<double>() == doctest::Approx(oracle::kDetRoot21).epsilon(1e-12));
}

TEST_CASE("schema strictness")
{
    Workspace w;
    Result r = run("gains", w.config(std::string("{") + kReferencePlant + R"(, "controler": {}})"), w.options());
    CHECK(r.code == kExitConfigError);
    CHECK(r.err.find("unknown key 'controler'") != std::string::npos);
    CHECK_FALSE(fs::exists(w.dir / "out"));

    r = run("gains", w.config(std::string("{") + kReferencePlant + R"(, "controller": {"pd": {"kpp": 1}}})"),
            w.options());
    CHECK(r.code == kExitConfigError);
    CHECK(r.err.find("controller.pd") != std::string::npos);

    CHECK(run("gains", w.config(R"({"D": 1.0, "plant": {"L": 1, "C": 1, "E": 1, "P": 1}})"), w.options()).code ==
          kExitConfigError);
    CHECK(run("gains", w.config(R"({"D": -1.0})"), w.options()).code == kExitConfigError);
    CHECK(run("gains", w.config(R"({"D": 1.0, "controller": {"kind": "lqr"}})"), w.options()).code ==
          kExitConfigError);
    CHECK(run("gains", w.config("{not json"), w.options()).code == kExitConfigError);
    CHECK(run("gains", (w.dir / "missing.json").string(), w.options()).code == kExitConfigError);
    CHECK(run("simulate", w.config(R"({"D": 1.0, "scenarios": [{"initial_state": [0.0, 1.0]}]})"), w.options())
              .code == kExitConfigError);
}

TEST_CASE("simulate writes deterministic CSV")
{
    Workspace w;
    const std::string cfg = w.config(reference_config(
        R"(, "scenarios": [{"name": "a", "initial_state": [0.4, 3.9], "duration": 2.0},
                           {"name": "empty", "initial_state": [0.4, 3.9], "duration": 0.0}])"));
    Options opt = w.options();
    opt.physical = true;
    REQUIRE(run("simulate", cfg, opt).code == kExitOk);
    const std::string first = w.read("a.csv");
    CHECK(first.rfind("tau,x1,x2,u_applied,u_raw,d_true,d_hat,h_d,saturated\n", 0) == 0);
    CHECK(w.read("empty.csv") == "tau,x1,x2,u_applied,u_raw,d_true,d_hat,h_d,saturated\n");
    CHECK(w.read("a_physical.csv").rfind("t,i,v,", 0) == 0);
    REQUIRE(run("simulate", cfg, opt).code == kExitOk);
    CHECK(w.read("a.csv") == first);
}

TEST_CASE("simulate reports numerical events")
{
    Workspace w;
    const std::string cfg = w.config(
        R"({"D": 0.59384, "controller": {"kind": "open_loop", "open_loop": {"u0": 1.0}},
            "scenarios": [{"name": "crash", "initial_state": [0.1, 0.2], "duration": 5.0}]})");
    const Result r = run("simulate", cfg, w.options());
    CHECK(r.code == kExitNumericalEvent);
    const std::string csv = w.read("crash.csv");
    CHECK(csv.find("\n# event: singularity") != std::string::npos);

    Options opt = w.options();
    opt.physical = true;
    CHECK(run("simulate", cfg, opt).code == kExitConfigError);
}

TEST_CASE("verify passes by default and catches a corrupted k2")
{
    Workspace w;
    Options opt = w.options();
    opt.samples = 200;
    Result r = run("verify", w.config(reference_config()), opt);
    CHECK(r.code == kExitOk);
    json d = json::parse(w.read("verify.json"));
    CHECK(d["passed"].get<bool>());
    bool saw_pde = false;
    for (const auto& p : d["properties"]) {
        if (p["name"] == "energy.pde_residual") {
            saw_pde = true;
            CHECK(p["worst"].get<double>() < 1e-8);
        }
    }
    CHECK(saw_pde);
    CHECK(d["expanded_law_as_printed"]["first_divergent_term"] == "gradient_1 dH_d/dx1");

    r = run("verify", w.config(reference_config(R"(, "verify": {"k2_offset": 0.1})")), opt);
    CHECK(r.code == kExitVerificationFailed);
    d = json::parse(w.read("verify.json"));
    for (const auto& p : d["properties"]) {
        if (p["name"] == "energy.gradient_at_equilibrium") {
            CHECK_FALSE(p["pass"].get<bool>());
        }
    }
}

TEST_CASE("phase output for the reference plant")
{
    Workspace w;
    const std::string cfg = w.config(reference_config(
        R"(, "region": {"grid_resolution": 200},
            "phase": {"grid": {"n1": 5, "n2": 5}, "initial_states": [[0.4, 3.9]], "duration": 1.0,
                      "levels": [-1.45, -1.43, -1.41], "include_c_star": false, "contour_resolution": 200})"));
    const Result r = run("phase", cfg, w.options());
    INFO(r.err);
    REQUIRE(r.code == kExitOk);
    const json s = json::parse(w.read("phase_summary.json"));
    REQUIRE(s["contours"].size() == 3);
    for (const auto& c : s["contours"]) {
        CHECK(c["closed"].get<bool>());
        CHECK(c["min_x1"].get<double>() > 0.0);
        CHECK(c["min_x2"].get<double>() > 0.0);
    }
    const Equilibrium eq = equilibrium_for(4.0, oracle::kDReference);
    const double k2 = compute_k2(eq, oracle::kDReference, 0.01);
    const Saddle sd = find_saddle(eq, oracle::kDReference, 0.01, k2, default_saddle_box(eq));
    CHECK(s["saddle"]["x1"].get<double>() == doctest::Approx(sd.state.x1).epsilon(1e-12));
    CHECK(s["saddle"]["x2"].get<double>() == doctest::Approx(sd.state.x2).epsilon(1e-12));

    std::istringstream contours(w.read("phase_contours.csv"));
    std::string line;
    std::getline(contours, line);
    CHECK(line == "level,source,vertex,x1,x2");
    int rows = 0;
    while (std::getline(contours, line)) {
        ++rows;
    }
    CHECK(rows > 30);
    CHECK(fs::exists(w.dir / "out" / "phase_traj_0.csv"));
}

TEST_CASE("phase grid with zero PD gains is the open-loop field at the equilibrium duty")
{
    Workspace w;
    const std::string cfg = w.config(
        R"({"D": 1.0, "controller": {"kind": "pd", "x2_star": 1.0, "pd": {"kp": 0.0, "kd": 0.0}},
            "phase": {"grid": {"x1": [1.0, 3.0], "x2": [0.5, 1.5], "n1": 7, "n2": 7}}})");
    REQUIRE(run("phase", cfg, w.options()).code == kExitOk);
    std::istringstream grid(w.read("phase_grid.csv"));
    std::string line;
    std::getline(grid, line);
    CHECK(line == "x1,x2,u_raw,u_applied,dx1,dx2");
    int rows = 0;
    while (std::getline(grid, line)) {
        double x1, x2, ur, ua, f1, f2;
        char c;
        std::istringstream row(line);
        row >> x1 >> c >> x2 >> c >> ur >> c >> ua >> c >> f1 >> c >> f2;
        const Vec2 expected = vector_field({x1, x2}, 0.5, 1.0);
        CHECK(ua == 0.5);
        CHECK(f1 == doctest::Approx(expected.v1).epsilon(1e-11));
        CHECK(f2 == doctest::Approx(expected.v2).epsilon(1e-11));
        ++rows;
    }
    CHECK(rows == 49);
    const json s = json::parse(w.read("phase_summary.json"));
    CHECK_FALSE(s.contains("contours"));
}

TEST_CASE("zerodyn and region documents")
{
    Workspace w;
    const std::string cfg = w.config(reference_config(R"(, "region": {"grid_resolution": 150}, "zerodyn": {"points": 11})"));
    REQUIRE(run("zerodyn", cfg, w.options()).code == kExitOk);
    const json z = json::parse(w.read("zerodyn.json"));
    CHECK(z["current_fixed"]["slope"].get<double>() == doctest::Approx(oracle::kZdCurrentSlope).epsilon(1e-12));
    CHECK_FALSE(z["voltage_fixed"]["printed_form_matches"].get<bool>());
    CHECK(w.read("zerodyn_voltage.csv").rfind("x1,w,w_printed,u_hold\n", 0) == 0);

    REQUIRE(run("region", cfg, w.options()).code == kExitOk);
    const json r = json::parse(w.read("region.json"));
    CHECK(r["c_star"].get<double>() > r["energy_at_equilibrium"].get<double>());
    CHECK(r["saddle"]["field_norm"].get<double>() <= 1e-10);
    CHECK(r["grid_resolution"] == 150);
}
