// Command-line front end: asmx <sweep|transient|noise|montecarlo|margins> [options]

#include "asmx/config.hpp"
#include "asmx/errors.hpp"
#include "asmx/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConvergence = 2;
constexpr int kExitConfig = 3;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Device-level simulator of a differential-pair softmax circuit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string preset;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> points;
    std::optional<int> trials;
    std::optional<double> sigma;
    std::string noise_flag;

    auto* config_opt = app.add_option("--config", config_path, "Configuration file")->check(CLI::ExistingFile);
    auto* preset_opt = app.add_option("--preset", preset, "Built-in preset")
                           ->check(CLI::IsMember(asmx::config::preset_names()));
    config_opt->excludes(preset_opt);
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--seed", seed, "RNG seed (overrides the config)");
    app.add_option("--points", points, "Sweep points");
    app.add_option("--trials", trials, "Monte-Carlo trials");
    app.add_option("--sigma", sigma, "Relative prefactor mismatch sigma");
    app.add_option("--noise", noise_flag, "Transient noise on|off")->check(CLI::IsMember({"on", "off"}));

    for (const char* name : {"sweep", "transient", "noise", "montecarlo", "margins"}) {
        app.add_subcommand(name)->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (config_path.empty() == preset.empty()) {
            throw asmx::ConfigError("command line", 0, "exactly one of --config or --preset is required");
        }
        asmx::RunManifest manifest;
        manifest.command = asmx::parse_command(app.get_subcommands().front()->get_name());
        manifest.config = preset.empty() ? asmx::config::load_config(config_path) : asmx::config::load_preset(preset);
        manifest.output_dir = out_dir;

        asmx::Overrides overrides;
        overrides.seed = seed;
        overrides.points = points;
        overrides.trials = trials;
        overrides.sigma = sigma;
        if (!noise_flag.empty()) overrides.noise = noise_flag == "on";
        asmx::apply_overrides(manifest.config, manifest.command, overrides);

        const auto outcome = asmx::run(manifest);
        std::cout << outcome.summary;
        for (const auto& f : outcome.files) std::cout << "wrote " << f.string() << "\n";
        return kExitOk;
    } catch (const asmx::ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << "\n";
        return kExitConvergence;
    } catch (const asmx::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const asmx::DomainError& e) {
        std::cerr << "invalid parameters: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}
