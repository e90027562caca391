#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "sectopo/classify.hpp"
#include "sectopo/integrate.hpp"
#include "sectopo/kamscan.hpp"
#include "sectopo/systems.hpp"

namespace sectopo::io {

/// key = value lines grouped under [section] headers. '#' and ';' start
/// comments. Keys are addressed as "section.key".
struct IniEntry {
    std::string value;
    int line = 0;
};

struct IniDocument {
    std::map<std::string, IniEntry> entries;
};

IniDocument parse_ini(std::string_view text);

enum class SystemKind { Pendulum, Satellite };

struct RunConfig {
    SystemKind system = SystemKind::Pendulum;
    std::uint64_t seed = 20100901;
    unsigned threads = 1;

    PendulumParams pendulum;
    /// "random": draw the state from the seeded sampler (index 0, 1, ...).
    /// "angles": use alpha / alpha_dot below.
    bool pendulum_random = true;
    std::array<double, 3> alpha{0.0, 0.0, 0.0};
    std::array<double, 3> alpha_dot{0.0, 0.0, 0.0};
    double velocity_scale = 1.0;

    SatelliteParams satellite;
    SatelliteState satellite_state{0.28, 0.82, 0.15, 0.37};

    IntegratorConfig integrator;
    ClassifierConfig classifier;

    double slab_halfwidth = 1e-3;
    bool require_stable_curves = true;
    /// Number of initial conditions the section command tries; it stops at
    /// the first one with a Curves verdict.
    std::size_t search = 1;
    /// Half-width of the box of satellite starting points searched around
    /// the configured one.
    double search_radius = 0.05;

    /// Spacing of the sampled-state dump of the simulate command.
    double dump_interval = 0.1;

    /// Grid of the scan command. Its seed, threads, slab, chain, integrator
    /// and classifier are taken from the fields above by scan_config().
    ScanConfig scan;

    void validate() const;
    SectionOptions section_options() const;
    ScanConfig scan_config() const;
};

/// Unknown sections or keys and malformed values throw ConfigError with the
/// offending line and key.
RunConfig parse_run_config(std::string_view text);

/// Every key with its resolved value. parse_run_config(to_ini(c)) == c.
std::string to_ini(const RunConfig& cfg);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

std::string_view to_string(SystemKind kind);

} // namespace sectopo::io
