#pragma once

#include "asmx/config.hpp"
#include "asmx/transient.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace asmx {

enum class Command { sweep, transient, noise, montecarlo, margins };

const char* to_string(Command command);
/// Throws ConfigError for unknown names.
Command parse_command(const std::string& name);

/// Command-line overrides applied on top of a loaded configuration.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> points;
    std::optional<int> trials;
    std::optional<double> sigma;
    std::optional<bool> noise;
};

struct RunManifest {
    Command command = Command::sweep;
    config::RunConfig config;
    std::filesystem::path output_dir;
};

struct RunOutcome {
    std::string summary;
    std::vector<std::filesystem::path> files;
};

/// Transient setup described by the [transient] section: the selected input
/// pulses, the others hold their configured values. Throws ConfigError when
/// the section is missing.
TransientConfig transient_config(const config::RunConfig& config);

/// Validates and applies overrides in place. Throws ConfigError.
void apply_overrides(config::RunConfig& config, Command command, const Overrides& overrides);

/// Runs one analysis and writes summary.txt plus its CSV into output_dir.
/// Throws ConfigError, DomainError or ConvergenceError.
RunOutcome run(const RunManifest& manifest);

}  // namespace asmx
