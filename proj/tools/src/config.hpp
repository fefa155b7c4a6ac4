#pragma once

// Run configuration: a JSON document parsed against a strict schema.

#include "bbcpl/analysis.hpp"
#include "bbcpl/model.hpp"
#include "bbcpl/sim.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bbcpl::cli {

/// Invalid or unreadable configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OpenLoopInput {
    double u0{0.8};
    double amplitude{0.0};
    double omega{1.0};
};

struct ScenarioConfig {
    std::string name{"run"};
    Scenario scenario;
};

struct GridConfig {
    SearchBox box{0.05, 3.0, 0.05, 8.0};
    int n1{25};
    int n2{25};
};

struct PhaseConfig {
    GridConfig grid;
    std::vector<State> initial_states;
    double duration{30.0};
    double step{1e-3};
    std::vector<double> levels;
    bool include_c_star{true};
    int contour_resolution{400};
};

struct ZeroDynConfig {
    double x1_min{0.1};
    double x1_max{3.0};
    double x2_min{0.5};
    double x2_max{8.0};
    int points{101};
};

struct VerifyConfig {
    std::size_t samples{1000};
    std::uint64_t seed{1};
    double k2_offset{0.0};
    double lo{0.1};
    double hi{10.0};
};

struct RunConfig {
    std::optional<PhysicalParams> plant;
    double D{0.0};
    ControllerSpec controller;
    OpenLoopInput open_loop;
    std::vector<ScenarioConfig> scenarios;
    PhaseConfig phase;
    DomainOptions region;
    ZeroDynConfig zerodyn;
    VerifyConfig verify;

    [[nodiscard]] Equilibrium equilibrium() const { return equilibrium_for(controller.x2_star, D); }
};

/// Parses and validates a configuration document. Throws ConfigError with a
/// path-qualified message (for example "controller.pd: unknown key 'kpp'").
[[nodiscard]] RunConfig parse_config(const std::string& json_text);
[[nodiscard]] RunConfig load_config(const std::string& path);

} // namespace bbcpl::cli
