#pragma once

// Subcommand implementations. Each writes its files under options.out_dir,
// prints a short summary (or the JSON document) to `out`, and returns the
// process exit code.

#include "config.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace bbcpl::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitVerificationFailed = 1,
    kExitConfigError = 2,
    kExitNumericalEvent = 3,
};

struct Options {
    std::filesystem::path out_dir{"out"};
    bool physical{false};
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;
};

int cmd_gains(const RunConfig& cfg, const Options& opt, std::ostream& out);
int cmd_simulate(const RunConfig& cfg, const Options& opt, std::ostream& out);
int cmd_phase(const RunConfig& cfg, const Options& opt, std::ostream& out);
int cmd_verify(const RunConfig& cfg, const Options& opt, std::ostream& out);
int cmd_zerodyn(const RunConfig& cfg, const Options& opt, std::ostream& out);
int cmd_region(const RunConfig& cfg, const Options& opt, std::ostream& out);

/// Loads the config and dispatches, mapping exceptions to exit codes
/// (config and precondition errors 2, numerical failures 3).
int run_command(const std::string& name, const std::string& config_path, const Options& opt, std::ostream& out,
                std::ostream& err);

} // namespace bbcpl::cli
