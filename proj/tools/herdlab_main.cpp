#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "herdlab/errors.hpp"
#include "herdlab/run.hpp"
#include "herdlab/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"herdlab - planar herding simulation and analysis"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    int threads = 0;  // 0: hardware concurrency

    for (const std::string name :
         {"simulate", "equilibria", "stability", "roa", "sweep", "pi-roa"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "scenario file (JSON)")->required();
        sub->add_option("--out-dir", out_dir, "output directory (default: .)");
        sub->add_option("--threads", threads, "worker threads (default: all cores)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (const char* env = std::getenv("HERDLAB_THREADS")) {
        try {
            threads = std::stoi(env);
        } catch (...) {
            std::cerr << "error: HERDLAB_THREADS must be an integer\n";
            return 1;
        }
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        const herdlab::ScenarioConfig config = herdlab::load_scenario(config_path);
        for (const std::string& notice : config.notices) std::cerr << "notice: " << notice << "\n";
        return herdlab::run_command(command, config, out_dir, threads);
    } catch (const herdlab::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const herdlab::ValidationError& e) {
        std::cerr << "error: invalid config: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
