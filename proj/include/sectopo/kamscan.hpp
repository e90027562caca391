#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "sectopo/classify.hpp"
#include "sectopo/integrate.hpp"
#include "sectopo/systems.hpp"

namespace sectopo {

/// Monte-Carlo sweep over the (eps1, eps2) attachment square.
struct ScanConfig {
    double eps1_min = 0.0;
    double eps1_max = 1.0;
    double eps2_min = 0.0;
    double eps2_max = 1.0;
    double grid_step = 0.1;
    std::size_t samples_per_cell = 16;
    std::uint64_t seed = 20100901;
    /// Initial segment rates are drawn uniformly from [-w, w].
    double velocity_scale = 1.0;
    double slab_halfwidth = 1e-3;
    /// A Curves verdict counts only if classify_half_slab agrees.
    bool require_stable_curves = true;
    /// Lengths and masses of the chain; eps and gravity are overridden.
    PendulumParams chain;
    IntegratorConfig integrator;
    ClassifierConfig classifier;
    unsigned threads = 1;

    void validate() const;
    std::vector<double> eps1_nodes() const;
    std::vector<double> eps2_nodes() const;
};

/// Deterministic generator for one (seed, i, j, sample) substream.
class SampleRng {
public:
    SampleRng(std::uint64_t seed, std::uint64_t i, std::uint64_t j, std::uint64_t sample);
    explicit SampleRng(std::uint64_t seed) : SampleRng(seed, 0, 0, 0) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

private:
    std::mt19937_64 engine_;
};

/// Angles uniform on (-pi, pi], rates uniform on [-w, w], built through the
/// angle parametrization and projected onto the constraint manifold.
CartesianState sample_initial_state(const PendulumParams& params, SampleRng& rng,
                                    double velocity_scale, double projection_tol = 1e-11);

struct PlaneRecord {
    std::string label;
    Verdict verdict;
    /// Verdict of the same cloud with the slab halved (only for Curves).
    VerdictLabel half_slab_label = VerdictLabel::Empty;
    /// Label after the stability rule: unconfirmed Curves become Inconclusive.
    VerdictLabel final_label = VerdictLabel::Empty;
};

/// Sections of one trajectory on the default planes through its initial
/// point. integrator.max_crossings caps the points kept per plane.
struct SectionOptions {
    double slab_halfwidth = 1e-3;
    bool require_stable_curves = true;
    IntegratorConfig integrator;
    ClassifierConfig classifier;
};

struct SectionRun {
    std::vector<SectionCloud> clouds;
    std::vector<PlaneRecord> planes;
    std::size_t steps = 0;
    /// Relative drift of the system invariants (see integrate_trajectory).
    std::vector<double> max_relative_drift;

    bool has_curves() const;
};

/// Planes through the reduced coordinates of s0. Needs gravity = 0.
SectionRun section_pendulum(const PendulumParams& params, const CartesianState& s0,
                            const SectionOptions& opt);
/// Planes through (psi, theta, p_psi, p_theta) of s0.
SectionRun section_satellite(const SatelliteParams& params, const SatelliteState& s0,
                             const SectionOptions& opt);

struct SampleRecord {
    std::size_t index = 0;
    bool failed = false;
    std::string failure;
    double energy = 0.0;
    double angular_momentum = 0.0;
    std::vector<PlaneRecord> planes;

    bool has_curves() const;
    /// Counts toward the empty-section proportion: finished without any
    /// confirmed Curves.
    bool counts_as_empty() const { return !failed && !has_curves(); }
};

struct ScanCell {
    double eps1 = 0.0;
    double eps2 = 0.0;
    std::size_t n_samples = 0;
    std::size_t n_empty_or_points = 0;
    std::size_t n_failed = 0;
    double proportion = 0.0;
    std::vector<SampleRecord> samples;
};

struct ScanResult {
    ScanConfig config;
    std::vector<double> eps1_values;
    std::vector<double> eps2_values;
    /// cells[i * eps2_values.size() + j] holds (eps1_values[i], eps2_values[j]).
    std::vector<ScanCell> cells;
    /// Mean proportion over eps2 for each eps1 column.
    std::vector<double> marginal_eps1;

    const ScanCell& cell(std::size_t i, std::size_t j) const { return cells[i * eps2_values.size() + j]; }
};

/// Integrates one seeded initial condition and classifies its sections on
/// the default planes through its reduced initial point.
SampleRecord run_sample(const ScanConfig& cfg, double eps1, double eps2, std::size_t i,
                        std::size_t j, std::size_t sample);

ScanCell run_cell(double eps1, double eps2, const ScanConfig& cfg, std::size_t i = 0,
                  std::size_t j = 0);

/// Summarizes per-sample records into a cell.
ScanCell make_cell(double eps1, double eps2, std::vector<SampleRecord> samples);

using ScanProgress = std::function<void(std::size_t done, std::size_t total)>;

ScanResult scan(const ScanConfig& cfg, const ScanProgress& progress = {});

} // namespace sectopo
