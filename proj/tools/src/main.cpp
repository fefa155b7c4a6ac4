#include "commands.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Adaptive IDA-PBC for a buck-boost converter with a constant power load"};
    app.require_subcommand(1, 1);

    std::string config;
    std::string out_dir = "./out";
    bool physical = false;
    std::uint64_t seed = 0;
    std::size_t samples = 0;

    struct Entry {
        const char* name;
        const char* help;
    };
    const Entry entries[] = {
        {"gains", "gain bounds, k2 and the PD stability cone"},
        {"simulate", "simulate the configured scenarios and write CSV trajectories"},
        {"phase", "vector-field grid, trajectory bundle and level curves"},
        {"verify", "run the property checks and write a pass/fail report"},
        {"zerodyn", "zero-dynamics samples and slopes"},
        {"region", "sublevel-set estimate of the domain of attraction"},
    };
    std::vector<CLI::App*> subs;
    for (const Entry& e : entries) {
        CLI::App* sub = app.add_subcommand(e.name, e.help);
        sub->add_option("--config", config, "JSON configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory")->capture_default_str();
        sub->add_flag("--physical", physical, "also write physical-unit CSV files (simulate)");
        sub->add_option("--seed", seed, "seed for random sample points (verify)");
        sub->add_option("--samples", samples, "number of sample points (verify)")->check(CLI::PositiveNumber);
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : bbcpl::cli::kExitConfigError;
    }

    bbcpl::cli::Options opt;
    opt.out_dir = out_dir;
    opt.physical = physical;
    for (CLI::App* sub : subs) {
        if (sub->parsed()) {
            if (sub->count("--seed") > 0) {
                opt.seed = seed;
            }
            if (sub->count("--samples") > 0) {
                opt.samples = samples;
            }
            return bbcpl::cli::run_command(sub->get_name(), config, opt, std::cout, std::cerr);
        }
    }
    return bbcpl::cli::kExitConfigError;
}
