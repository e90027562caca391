#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sectopo/io/config.hpp"
#include "sectopo/io/results.hpp"
#include "sectopo/kamscan.hpp"

namespace sectopo::io {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumeric = 3, kExitInternal = 4 };

struct CommandOutput {
    Artifacts artifacts;
    nlohmann::json summary;
};

CommandOutput run_simulate(const RunConfig& cfg, bool dump);

struct SectionAttempt {
    std::size_t index = 0;
    /// Pendulum: alpha1..3, alpha_dot1..3. Satellite: psi, theta, p_psi, p_theta.
    std::vector<double> initial;
    bool failed = false;
    std::string failure;
    bool has_curves = false;
};

struct SectionSearch {
    std::vector<SectionAttempt> attempts;
    /// Index into attempts of the run kept: the first with Curves,
    /// otherwise the first that finished.
    std::size_t chosen = 0;
    SectionRun run;
};

/// Tries up to cfg.search initial conditions. Attempt 0 is the configured
/// state (or random draw 0); later attempts are seeded draws for the
/// pendulum and seeded perturbations within search_radius for the
/// satellite. Rethrows the last NumericError if every attempt failed.
SectionSearch search_sections(const RunConfig& cfg);

CommandOutput run_section(const RunConfig& cfg);
CommandOutput run_scan(const RunConfig& cfg, const ScanProgress& progress = {});

/// Redraws the figures of the JSON results found in dir.
CommandOutput run_report(const std::filesystem::path& dir);

/// Loads an INI config, or the effective config inside a manifest JSON.
/// Returns the parsed config and the raw bytes of the file.
std::pair<RunConfig, std::string> load_config(const std::filesystem::path& path);

/// Entry point of the sectopo tool; returns one of ExitCode.
int run(int argc, const char* const* argv);

} // namespace sectopo::io
