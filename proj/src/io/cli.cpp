#include "sectopo/io/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "sectopo/errors.hpp"
#include "sectopo/io/manifest.hpp"
#include "sectopo/io/svg.hpp"
#include "sectopo/reduction.hpp"

namespace sectopo::io {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json invariant_json(const char* name, double initial, double drift) {
    return {{"name", name}, {"initial", initial}, {"max_relative_drift", drift}};
}

// Rows at t = 0, dt, 2 dt, ... read off the dense output of each step.
template <std::size_t N, class Map>
class Sampler {
public:
    Sampler(double dt, Map map) : dt_(dt), map_(std::move(map)) {}

    void first(double t, const StateVec<N>& y) { emit(t, y); }

    void step(const DenseSegment<N>& dense) {
        while (true) {
            const double t = static_cast<double>(next_) * dt_;
            if (t > dense.t1()) break;
            emit(t, dense.eval(t));
        }
    }

    std::vector<std::pair<double, Phase>> rows;

private:
    void emit(double t, const StateVec<N>& y) {
        rows.emplace_back(t, map_(y));
        ++next_;
    }

    double dt_;
    Map map_;
    std::size_t next_ = 0;
};

CartesianState pendulum_start(const RunConfig& cfg, std::size_t draw) {
    const PendulumParams& p = cfg.pendulum;
    if (!cfg.pendulum_random && draw == 0)
        return project_to_manifold(p, state_from_angles(p, SegmentAngles{cfg.alpha, cfg.alpha_dot}),
                                   cfg.integrator.projection_tol);
    SampleRng rng(cfg.seed, 0, 0, draw);
    return sample_initial_state(p, rng, cfg.velocity_scale, cfg.integrator.projection_tol);
}

SatelliteState satellite_start(const RunConfig& cfg, std::size_t draw) {
    SatelliteState s = cfg.satellite_state;
    if (draw == 0) return s;
    SampleRng rng(cfg.seed, 0, 0, draw);
    const double r = cfg.search_radius;
    s.psi += rng.uniform(-r, r);
    s.theta = std::clamp(s.theta + rng.uniform(-r, r), 1e-3, std::numbers::pi - 1e-3);
    s.p_psi += rng.uniform(-r, r);
    s.p_theta += rng.uniform(-r, r);
    return s;
}

std::vector<double> pendulum_initial_vector(const RunConfig& cfg, const CartesianState& s) {
    const SegmentAngles a = segment_angles(cfg.pendulum, s);
    return {a.angle[0], a.angle[1], a.angle[2], a.rate[0], a.rate[1], a.rate[2]};
}

json config_echo(const RunConfig& cfg) {
    json j;
    j["system"] = std::string(to_string(cfg.system));
    if (cfg.system == SystemKind::Pendulum) {
        j["eps1"] = cfg.pendulum.eps1;
        j["eps2"] = cfg.pendulum.eps2;
        j["gravity"] = cfg.pendulum.gravity;
        j["lengths"] = cfg.pendulum.lengths;
        j["masses"] = cfg.pendulum.masses;
    } else {
        j["alpha"] = cfg.satellite.alpha;
        j["beta"] = cfg.satellite.beta;
        j["form"] = cfg.satellite.form == SatelliteForm::Reduced ? "reduced" : "general";
    }
    j["t_end"] = cfg.integrator.t_end;
    j["rel_tol"] = cfg.integrator.rel_tol;
    j["abs_tol"] = cfg.integrator.abs_tol;
    j["seed"] = cfg.seed;
    return j;
}

} // namespace

std::pair<RunConfig, std::string> load_config(const std::filesystem::path& path) {
    std::string bytes = read_file(path);
    const auto first = bytes.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && bytes[first] == '{') {
        json j;
        try {
            j = json::parse(bytes);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("manifest is not valid JSON: ") + e.what());
        }
        return {parse_run_config(RunManifest::from_json(j).effective_config), std::move(bytes)};
    }
    return {parse_run_config(bytes), std::move(bytes)};
}

CommandOutput run_simulate(const RunConfig& cfg, bool dump) {
    CommandOutput out;
    json& s = out.summary;
    s["schema_version"] = kSchemaVersion;
    s["kind"] = "simulate";
    s["config"] = config_echo(cfg);
    std::vector<std::pair<double, Phase>> rows;

    if (cfg.system == SystemKind::Pendulum) {
        const PendulumParams& p = cfg.pendulum;
        if (dump && p.gravity != 0.0)
            throw ConfigError("the reduced-coordinate dump needs gravity = 0", 0, "gravity");
        const PendulumOde ode(p, cfg.integrator);
        const CartesianState s0 = pendulum_start(cfg, 0);
        const auto y0 = PendulumOde::pack(s0);
        double residual = constraint_values(p, s0).cwiseAbs().maxCoeff();
        auto to_phase = [&p](const StateVec<12>& y) { return reduce(p, PendulumOde::unpack(y)).as_array(); };
        Sampler<12, decltype(to_phase)> sampler(cfg.dump_interval, to_phase);
        if (dump && cfg.integrator.t_end > 0.0) sampler.first(0.0, y0);
        const auto sum = integrate_trajectory(
            ode, 0.0, y0, cfg.integrator, [&](const TrajectorySample<12>& smp, const DenseSegment<12>& dense) {
                residual = std::max(residual, constraint_values(p, PendulumOde::unpack(smp.state)).cwiseAbs().maxCoeff());
                if (dump) sampler.step(dense);
                return true;
            });
        rows = std::move(sampler.rows);
        s["initial"] = pendulum_initial_vector(cfg, s0);
        s["steps"] = sum.steps;
        s["rejected"] = sum.rejected;
        s["t_final"] = sum.final.t;
        json inv = json::array();
        inv.push_back(invariant_json("energy", pendulum_energy(p, s0), sum.max_relative_drift.at(0)));
        if (sum.max_relative_drift.size() > 1)
            inv.push_back(invariant_json("angular_momentum", pendulum_angular_momentum(p, s0),
                                         sum.max_relative_drift[1]));
        s["invariants"] = std::move(inv);
        s["max_constraint_residual"] = residual;
    } else {
        const SatelliteOde ode(cfg.satellite);
        const SatelliteState s0 = satellite_start(cfg, 0);
        const auto y0 = SatelliteOde::pack(s0);
        auto to_phase = [](const StateVec<4>& y) { return Phase(y); };
        Sampler<4, decltype(to_phase)> sampler(cfg.dump_interval, to_phase);
        if (dump && cfg.integrator.t_end > 0.0) sampler.first(0.0, y0);
        const auto sum = integrate_trajectory(ode, 0.0, y0, cfg.integrator,
                                              [&](const TrajectorySample<4>&, const DenseSegment<4>& dense) {
                                                  if (dump) sampler.step(dense);
                                                  return true;
                                              });
        rows = std::move(sampler.rows);
        s["initial"] = {s0.psi, s0.theta, s0.p_psi, s0.p_theta};
        s["steps"] = sum.steps;
        s["rejected"] = sum.rejected;
        s["t_final"] = sum.final.t;
        s["invariants"] = json::array(
            {invariant_json("energy", satellite_hamiltonian(cfg.satellite, s0), sum.max_relative_drift.at(0))});
    }

    if (dump) {
        s["samples_csv"] = "samples.csv";
        out.artifacts.emplace_back("samples.csv", samples_csv(rows));
    }
    out.artifacts.emplace_back("simulate.json", s.dump(2) + "\n");
    return out;
}

SectionSearch search_sections(const RunConfig& cfg) {
    SectionSearch search;
    const SectionOptions opt = cfg.section_options();
    bool have_run = false;
    std::optional<NumericError> last_error;
    for (std::size_t k = 0; k < cfg.search; ++k) {
        SectionAttempt attempt;
        attempt.index = k;
        try {
            SectionRun run;
            if (cfg.system == SystemKind::Pendulum) {
                const CartesianState s0 = pendulum_start(cfg, k);
                attempt.initial = pendulum_initial_vector(cfg, s0);
                run = section_pendulum(cfg.pendulum, s0, opt);
            } else {
                const SatelliteState s0 = satellite_start(cfg, k);
                attempt.initial = {s0.psi, s0.theta, s0.p_psi, s0.p_theta};
                run = section_satellite(cfg.satellite, s0, opt);
            }
            attempt.has_curves = run.has_curves();
            if (!have_run || attempt.has_curves) {
                search.run = std::move(run);
                search.chosen = k;
                have_run = true;
            }
        } catch (const NumericError& e) {
            attempt.failed = true;
            attempt.failure = e.what();
            last_error = e;
        }
        search.attempts.push_back(std::move(attempt));
        if (search.attempts.back().has_curves) break;
    }
    if (!have_run) throw *last_error;
    return search;
}

CommandOutput run_section(const RunConfig& cfg) {
    const SectionSearch search = search_sections(cfg);
    CommandOutput out;
    json& s = out.summary;
    s["schema_version"] = kSchemaVersion;
    s["kind"] = "section";
    s["config"] = config_echo(cfg);
    s["slab_halfwidth"] = cfg.slab_halfwidth;
    json attempts = json::array();
    for (const SectionAttempt& a : search.attempts) {
        json ja{{"index", a.index}, {"initial", a.initial}, {"failed", a.failed}, {"has_curves", a.has_curves}};
        if (a.failed) ja["failure"] = a.failure;
        attempts.push_back(std::move(ja));
    }
    s["attempts"] = std::move(attempts);
    s["chosen_attempt"] = search.chosen;
    s["initial"] = search.attempts[search.chosen].initial;
    s["steps"] = search.run.steps;
    s["max_relative_drift"] = search.run.max_relative_drift;
    s["non_integrability_witness"] = search.run.has_curves();
    s["title"] = std::string(cfg.system == SystemKind::Pendulum ? "Pendulum" : "Satellite") + " sections, attempt " +
                 std::to_string(search.chosen);

    json planes = json::array();
    for (std::size_t k = 0; k < search.run.clouds.size(); ++k) {
        const SectionCloud& cloud = search.run.clouds[k];
        const std::string csv_name = "section_" + std::to_string(k + 1) + ".csv";
        json jp = plane_record_json(search.run.planes[k]);
        jp["axis_labels"] = cloud.plane.axis_labels;
        jp["crossings_tested"] = cloud.crossings_tested;
        jp["csv"] = csv_name;
        json pts = json::array();
        for (const PlanePoint& uv : cloud.plane_coords) pts.push_back({uv[0], uv[1]});
        jp["points"] = std::move(pts);
        planes.push_back(std::move(jp));
        out.artifacts.emplace_back(csv_name, section_csv(cloud));
    }
    s["planes"] = std::move(planes);
    out.artifacts.emplace_back("sections.json", s.dump(2) + "\n");
    out.artifacts.emplace_back("sections.svg", scatter_svg_from_json(s));
    return out;
}

CommandOutput run_scan(const RunConfig& cfg, const ScanProgress& progress) {
    const ScanResult result = scan(cfg.scan_config(), progress);
    CommandOutput out;
    out.summary = scan_json(result);
    out.artifacts.emplace_back("scan.json", out.summary.dump(2) + "\n");
    out.artifacts.emplace_back("scan_cells.csv", scan_cells_csv(result));
    out.artifacts.emplace_back("scan_matrix.csv", scan_matrix_csv(result));
    out.artifacts.emplace_back("heatmap.svg", heatmap_svg_from_json(out.summary));
    out.artifacts.emplace_back("marginal.svg", marginal_svg_from_json(out.summary));
    return out;
}

CommandOutput run_report(const std::filesystem::path& dir) {
    CommandOutput out;
    bool found = false;
    const auto load = [&](const char* name) -> std::optional<json> {
        const auto path = dir / name;
        if (!std::filesystem::exists(path)) return std::nullopt;
        found = true;
        try {
            return json::parse(read_file(path));
        } catch (const json::exception& e) {
            throw ConfigError(path.string() + ": " + e.what());
        }
    };
    if (const auto j = load("scan.json")) {
        out.artifacts.emplace_back("heatmap.svg", heatmap_svg_from_json(*j));
        out.artifacts.emplace_back("marginal.svg", marginal_svg_from_json(*j));
        out.summary["scan"] = {{"eps1_values", j->at("eps1_values")}, {"marginal_eps1", j->at("marginal_eps1")}};
    }
    if (const auto j = load("sections.json")) {
        out.artifacts.emplace_back("sections.svg", scatter_svg_from_json(*j));
        json labels = json::array();
        for (const json& p : j->at("planes")) labels.push_back(p.at("final_label"));
        out.summary["sections"] = {{"final_labels", labels}};
    }
    if (!found) throw ConfigError("no scan.json or sections.json in " + dir.string());
    return out;
}

int run(int argc, const char* const* argv) {
    CLI::App app{"Sections of Hamiltonian trajectories by 2-planes, and the (eps1, eps2) sweep"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    bool dump = false;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "INI config, or a manifest.json of an earlier run")
            ->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "override [run] seed");
        sub->add_option("--threads", threads, "override [run] threads");
    };
    CLI::App* simulate = app.add_subcommand("simulate", "integrate one trajectory and report drifts");
    add_common(simulate);
    simulate->add_flag("--dump", dump, "also write samples.csv");
    CLI::App* section = app.add_subcommand("section", "cut trajectories with the default planes and classify");
    add_common(section);
    CLI::App* scan_cmd = app.add_subcommand("scan", "Monte-Carlo sweep over (eps1, eps2)");
    add_common(scan_cmd);
    CLI::App* report = app.add_subcommand("report", "redraw figures from the JSON results in --out");
    report->add_option("--out", out_dir, "directory holding scan.json and/or sections.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (report->parsed()) {
            const CommandOutput res = run_report(out_dir);
            commit(out_dir, res.artifacts);
            std::cout << res.summary.dump(2) << "\n";
            return kExitOk;
        }

        auto [cfg, bytes] = load_config(config_path);
        if (seed) cfg.seed = *seed;
        if (threads) cfg.threads = *threads;
        cfg.validate();

        RunManifest manifest;
        manifest.started_utc = utc_now();
        manifest.seed = cfg.seed;
        manifest.effective_config = to_ini(cfg);
        manifest.input_digests[config_path] = sha256_hex(bytes);

        CommandOutput res;
        if (simulate->parsed()) {
            manifest.command = "simulate";
            res = run_simulate(cfg, dump);
        } else if (section->parsed()) {
            manifest.command = "section";
            res = run_section(cfg);
        } else {
            manifest.command = "scan";
            res = run_scan(cfg, [](std::size_t done, std::size_t total) {
                if (done == total || done % std::max<std::size_t>(1, total / 20) == 0)
                    std::cerr << "scan: " << done << "/" << total << "\n";
            });
        }
        manifest.finished_utc = utc_now();
        res.artifacts.emplace_back("effective_config.ini", manifest.effective_config);
        res.artifacts.emplace_back("manifest.json", manifest.to_json().dump(2) + "\n");
        commit(out_dir, res.artifacts);
        std::cout << manifest.command << ": wrote " << res.artifacts.size() << " files to " << out_dir << "\n";
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error";
        if (!config_path.empty()) std::cerr << " in " << config_path;
        if (e.line() > 0) std::cerr << ", line " << e.line();
        if (!e.field().empty()) std::cerr << ", key " << e.field();
        std::cerr << ": " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

} // namespace sectopo::io
