#include "sectopo/kamscan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numbers>
#include <thread>

#include "sectopo/errors.hpp"
#include "sectopo/reduction.hpp"
#include "sectopo/sections.hpp"

namespace sectopo {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<double> grid_nodes(double lo, double hi, double step) {
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> nodes(count);
    // Rounded to 12 decimals so that 3 * 0.1 is reported as 0.3.
    for (std::size_t k = 0; k < count; ++k)
        nodes[k] = std::min(hi, std::round((lo + static_cast<double>(k) * step) * 1e12) / 1e12);
    return nodes;
}

} // namespace

void ScanConfig::validate() const {
    if (!(grid_step > 0.0)) throw ConfigError("grid_step must be positive", 0, "grid_step");
    if (samples_per_cell < 1)
        throw ConfigError("samples_per_cell must be at least 1", 0, "samples_per_cell");
    if (!(eps1_min >= 0.0 && eps1_max <= 1.0 && eps1_min <= eps1_max))
        throw ConfigError("eps1 range must lie inside [0, 1]", 0, "eps1_min");
    if (!(eps2_min >= 0.0 && eps2_max <= 1.0 && eps2_min <= eps2_max))
        throw ConfigError("eps2 range must lie inside [0, 1]", 0, "eps2_min");
    if (!(velocity_scale >= 0.0))
        throw ConfigError("velocity_scale must be non-negative", 0, "velocity_scale");
    if (!(slab_halfwidth > 0.0))
        throw ConfigError("slab_halfwidth must be positive", 0, "slab_halfwidth");
    if (chain.gravity != 0.0)
        throw ConfigError("the sweep needs the rotation-invariant chain (gravity = 0)", 0, "gravity");
    if (threads < 1) throw ConfigError("threads must be at least 1", 0, "threads");
    PendulumParams probe = chain;
    probe.eps1 = eps1_min;
    probe.eps2 = eps2_min;
    probe.validate();
    integrator.validate();
    classifier.validate();
}

std::vector<double> ScanConfig::eps1_nodes() const { return grid_nodes(eps1_min, eps1_max, grid_step); }
std::vector<double> ScanConfig::eps2_nodes() const { return grid_nodes(eps2_min, eps2_max, grid_step); }

SampleRng::SampleRng(std::uint64_t seed, std::uint64_t i, std::uint64_t j, std::uint64_t sample) {
    std::uint64_t x = seed;
    std::uint64_t h = splitmix64(x);
    for (std::uint64_t part : {i, j, sample}) {
        x = h ^ (part + 0x632be59bd9b4e019ULL);
        h = splitmix64(x);
    }
    std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
    engine_.seed(seq);
}

double SampleRng::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

CartesianState sample_initial_state(const PendulumParams& params, SampleRng& rng,
                                    double velocity_scale, double projection_tol) {
    SegmentAngles a;
    for (double& angle : a.angle) angle = std::numbers::pi - 2.0 * std::numbers::pi * rng.uniform01();
    for (double& rate : a.rate) rate = rng.uniform(-velocity_scale, velocity_scale);
    return project_to_manifold(params, state_from_angles(params, a), projection_tol);
}

bool SampleRecord::has_curves() const {
    for (const PlaneRecord& p : planes)
        if (p.final_label == VerdictLabel::Curves) return true;
    return false;
}

namespace {

PlaneRecord judge(const SectionCloud& cloud, const SectionOptions& opt) {
    PlaneRecord pr;
    pr.label = cloud.plane.label;
    pr.verdict = classify(cloud, opt.classifier);
    pr.final_label = pr.verdict.label;
    if (pr.verdict.label == VerdictLabel::Curves) {
        pr.half_slab_label = classify_half_slab(cloud, opt.classifier).label;
        if (opt.require_stable_curves && pr.half_slab_label != VerdictLabel::Curves)
            pr.final_label = VerdictLabel::Inconclusive;
    }
    return pr;
}

template <class Ode, class PhaseMap>
SectionRun run_sections(const Ode& ode, const typename Ode::State& y0, std::vector<PlaneSpec> planes,
                        PhaseMap phase_map, const SectionOptions& opt) {
    SectionCollector<Ode::dimension> collector(std::move(planes), phase_map, y0, 0.0,
                                               opt.integrator.max_crossings);
    const auto summary = integrate_trajectory(ode, 0.0, y0, opt.integrator, collector.observer());
    SectionRun run;
    run.steps = summary.steps;
    run.max_relative_drift = summary.max_relative_drift;
    run.clouds = collector.take_clouds();
    for (const SectionCloud& cloud : run.clouds) run.planes.push_back(judge(cloud, opt));
    return run;
}

} // namespace

bool SectionRun::has_curves() const {
    return std::any_of(planes.begin(), planes.end(),
                       [](const PlaneRecord& p) { return p.final_label == VerdictLabel::Curves; });
}

SectionRun section_pendulum(const PendulumParams& params, const CartesianState& s0,
                            const SectionOptions& opt) {
    const PendulumOde ode(params, opt.integrator);
    const CartesianState start = project_to_manifold(params, s0, opt.integrator.projection_tol);
    const ReducedState r0 = reduce(params, start);
    return run_sections(
        ode, PendulumOde::pack(start),
        default_planes(r0.as_array(), PhaseLayout::pendulum(), opt.slab_halfwidth),
        [&params](const StateVec<12>& y) { return reduce(params, PendulumOde::unpack(y)).as_array(); },
        opt);
}

SectionRun section_satellite(const SatelliteParams& params, const SatelliteState& s0,
                             const SectionOptions& opt) {
    const SatelliteOde ode(params);
    const auto y0 = SatelliteOde::pack(s0);
    return run_sections(ode, y0, default_planes(y0, PhaseLayout::satellite(), opt.slab_halfwidth),
                        [](const StateVec<4>& y) { return Phase(y); }, opt);
}

SampleRecord run_sample(const ScanConfig& cfg, double eps1, double eps2, std::size_t i,
                        std::size_t j, std::size_t sample) {
    PendulumParams params = cfg.chain;
    params.eps1 = eps1;
    params.eps2 = eps2;
    params.gravity = 0.0;

    SampleRecord rec;
    rec.index = sample;
    try {
        SampleRng rng(cfg.seed, i, j, sample);
        const CartesianState s0 =
            sample_initial_state(params, rng, cfg.velocity_scale, cfg.integrator.projection_tol);
        rec.energy = pendulum_energy(params, s0);
        rec.angular_momentum = pendulum_angular_momentum(params, s0);
        const SectionOptions opt{cfg.slab_halfwidth, cfg.require_stable_curves, cfg.integrator,
                                 cfg.classifier};
        rec.planes = section_pendulum(params, s0, opt).planes;
    } catch (const NumericError& e) {
        rec.failed = true;
        rec.failure = e.what();
        rec.planes.clear();
    }
    return rec;
}

ScanCell make_cell(double eps1, double eps2, std::vector<SampleRecord> samples) {
    ScanCell cell;
    cell.eps1 = eps1;
    cell.eps2 = eps2;
    cell.n_samples = samples.size();
    for (const SampleRecord& s : samples) {
        if (s.failed) ++cell.n_failed;
        if (s.counts_as_empty()) ++cell.n_empty_or_points;
    }
    cell.proportion = cell.n_samples > 0 ? static_cast<double>(cell.n_empty_or_points) /
                                               static_cast<double>(cell.n_samples)
                                         : 0.0;
    cell.samples = std::move(samples);
    return cell;
}

ScanCell run_cell(double eps1, double eps2, const ScanConfig& cfg, std::size_t i, std::size_t j) {
    cfg.validate();
    if (!(eps1 >= 0.0 && eps1 <= 1.0 && eps2 >= 0.0 && eps2 <= 1.0))
        throw ConfigError("cell parameters must lie in [0, 1]");
    std::vector<SampleRecord> samples;
    for (std::size_t s = 0; s < cfg.samples_per_cell; ++s)
        samples.push_back(run_sample(cfg, eps1, eps2, i, j, s));
    return make_cell(eps1, eps2, std::move(samples));
}

ScanResult scan(const ScanConfig& cfg, const ScanProgress& progress) {
    cfg.validate();
    ScanResult result;
    result.config = cfg;
    result.eps1_values = cfg.eps1_nodes();
    result.eps2_values = cfg.eps2_nodes();
    const std::size_t n1 = result.eps1_values.size();
    const std::size_t n2 = result.eps2_values.size();
    const std::size_t per_cell = cfg.samples_per_cell;
    const std::size_t total = n1 * n2 * per_cell;

    std::vector<SampleRecord> records(total);
    std::atomic<std::size_t> next{0};
    std::size_t done = 0;
    std::mutex progress_mutex;
    std::exception_ptr failure;
    std::mutex failure_mutex;

    const auto worker = [&] {
        for (;;) {
            const std::size_t unit = next.fetch_add(1);
            if (unit >= total) return;
            const std::size_t cell_index = unit / per_cell;
            const std::size_t i = cell_index / n2;
            const std::size_t j = cell_index % n2;
            try {
                records[unit] = run_sample(cfg, result.eps1_values[i], result.eps2_values[j], i, j,
                                           unit % per_cell);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(total);
                return;
            }
            std::lock_guard lock(progress_mutex);
            ++done;
            if (progress) progress(done, total);
        }
    };

    const unsigned nthreads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(total)));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    result.cells.reserve(n1 * n2);
    for (std::size_t c = 0; c < n1 * n2; ++c) {
        std::vector<SampleRecord> samples(std::make_move_iterator(records.begin() + c * per_cell),
                                          std::make_move_iterator(records.begin() + (c + 1) * per_cell));
        result.cells.push_back(
            make_cell(result.eps1_values[c / n2], result.eps2_values[c % n2], std::move(samples)));
    }
    result.marginal_eps1.assign(n1, 0.0);
    for (std::size_t i = 0; i < n1; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n2; ++j) sum += result.cell(i, j).proportion;
        result.marginal_eps1[i] = sum / static_cast<double>(n2);
    }
    return result;
}

} // namespace sectopo
