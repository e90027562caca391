#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sectopo/sections.hpp"

namespace sectopo {

enum class VerdictLabel { Empty, Points, Curves, Inconclusive };

std::string_view to_string(VerdictLabel label);
VerdictLabel parse_verdict_label(std::string_view text);

struct ClassifierConfig {
    std::size_t n_min = 10;
    double link_factor = 5.0;
    double point_diam_factor = 10.0;
    double curve_diam_factor = 50.0;
    double dim_lo = 0.3;
    double dim_hi = 0.7;
    /// A plane is degenerate for a trajectory when at least
    /// degenerate_fraction of its points sit within degenerate_band * slab of
    /// the slab centre. Transversal crossings fill the slab evenly; a
    /// trajectory whose invariant set meets the plane along a whole curve
    /// piles up at zero offset. Uniform offsets put about degenerate_band of
    /// the points there, so the fraction sits well above it.
    double degenerate_band = 0.1;
    double degenerate_fraction = 0.3;
    /// Curves also need the slab offsets of in-plane nearest neighbours to
    /// differ by a median of at least min_offset_spread * slab. When the
    /// offset is a smooth function of position along the curve, the curve
    /// is a level set of the slab functional on an invariant torus rather
    /// than a transversal cut.
    double min_offset_spread = 0.1;

    void validate() const;
};

struct Verdict {
    VerdictLabel label = VerdictLabel::Empty;
    std::size_t n_points = 0;
    std::size_t n_clusters = 0;
    double max_cluster_diameter = 0.0;
    /// NaN when the scaling window is degenerate or not computed.
    double correlation_dimension = 0.0;
    double delta_used = 0.0;
    bool degenerate_plane = false;
    /// Median neighbour offset difference over slab; only set for
    /// would-be Curves.
    double offset_spread = 0.0;
};

struct Cluster {
    std::vector<std::size_t> members;
    double diameter = 0.0;
};

/// Distance with shorter-arc differences on angular coordinates.
double phase_distance(const Phase& a, const Phase& b, const std::array<bool, 4>& angular);

/// Connected components of the graph joining points closer than delta.
/// Clusters are ordered by their smallest member index.
std::vector<Cluster> cluster(const SectionCloud& cloud, double delta);

struct DimensionEstimate {
    double slope = 0.0;
    double r_lo = 0.0;
    double r_hi = 0.0;
    std::size_t radii_used = 0;
};

/// Least-squares slope of log C(r) against log r over [3 slab, diameter / 4].
/// Throws DegenerateWindow when that interval is empty.
DimensionEstimate correlation_dimension(const SectionCloud& cloud);

Verdict classify(const SectionCloud& cloud, const ClassifierConfig& cfg = {});

/// Verdict on the cloud cut to half its slab, with the curve length
/// threshold kept at the full-slab scale. A genuine curve keeps its length
/// when the slab shrinks; an arc whose length comes from the slab width
/// shrinks with it and drops out.
Verdict classify_half_slab(const SectionCloud& cloud, const ClassifierConfig& cfg = {});

/// Curves on at least one plane obstruct integrability. Anything else is
/// only "no obstruction found".
bool non_integrability_witness(std::span<const Verdict> verdicts);

} // namespace sectopo
