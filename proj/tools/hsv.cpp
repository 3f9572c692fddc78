#include "hsv/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

int main(int argc, char** argv)
{
    CLI::App app{"Verification of covering relations, fixed points and horseshoe dynamics"};
    app.set_version_flag("--version", std::string(hsv::tool_version));
    app.require_subcommand(1);

    hsv::RunOptions opt;
    std::string command;
    const std::map<std::string_view, std::string> help{
        {"verify-covering", "Check covering and stretching relations from [check.*] sections"},
        {"fixed-points", "Certify fixed points in boxes and through [crossing.*] sections"},
        {"periodic-orbits", "Enclose periodic orbits with given symbol itineraries"},
        {"chaos-report", "Stretching checks, periodic-orbit census and entropy bound"},
        {"branch-track", "Connected zero branch across a parameter interval"},
        {"cutting-lab", "Cuts, sides and cut functions on a grid fixture"},
    };
    for (auto name : hsv::commands()) {
        auto* sub = app.add_subcommand(std::string(name), help.at(name));
        sub->callback([&command, name] { command = std::string(name); });
        sub->add_option("--config", opt.config_path, "Job configuration file")
            ->envname("HSV_CONFIG")
            ->required();
        sub->add_option("--out", opt.out_path, "Report file (default: standard output)")->envname("HSV_OUT");
        sub->add_option("--csv", opt.csv_path, "CSV file of enclosures")->envname("HSV_CSV");
        sub->add_option("--tol", opt.tol, "Enclosure width tolerance")->envname("HSV_TOL");
        sub->add_option("--max-period", opt.max_period, "Largest period searched")->envname("HSV_MAX_PERIOD");
        sub->add_option("--budget", opt.budget, "Box budget")->envname("HSV_BUDGET");
        sub->add_option("--seed", opt.seed, "Sampling seed")->envname("HSV_SEED");
        sub->add_option("--workers", opt.workers, "Worker threads (0: logical processors)")
            ->envname("HSV_WORKERS");
        sub->add_option("--strict-strips", opt.strict_strips, "Reject boxes off the horseshoe strips")
            ->envname("HSV_STRICT_STRIPS");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return hsv::exit_usage;
    }
    return hsv::run(command, opt, std::cout, std::cerr);
}
