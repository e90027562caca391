#include "sectopo/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sectopo/errors.hpp"

namespace sectopo {

std::string_view to_string(VerdictLabel label) {
    switch (label) {
    case VerdictLabel::Empty: return "Empty";
    case VerdictLabel::Points: return "Points";
    case VerdictLabel::Curves: return "Curves";
    case VerdictLabel::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

VerdictLabel parse_verdict_label(std::string_view text) {
    if (text == "Empty") return VerdictLabel::Empty;
    if (text == "Points") return VerdictLabel::Points;
    if (text == "Curves") return VerdictLabel::Curves;
    if (text == "Inconclusive") return VerdictLabel::Inconclusive;
    throw ConfigError("unknown verdict label '" + std::string(text) + "'");
}

void ClassifierConfig::validate() const {
    if (n_min < 1) throw ConfigError("n_min must be at least 1", 0, "n_min");
    if (!(link_factor > 0.0)) throw ConfigError("link_factor must be positive", 0, "link_factor");
    if (!(point_diam_factor > 0.0))
        throw ConfigError("point_diam_factor must be positive", 0, "point_diam_factor");
    if (!(curve_diam_factor > 0.0))
        throw ConfigError("curve_diam_factor must be positive", 0, "curve_diam_factor");
    if (!(dim_lo > 0.0 && dim_lo < dim_hi))
        throw ConfigError("classifier requires 0 < dim_lo < dim_hi", 0, "dim_lo");
    if (!(degenerate_band > 0.0 && degenerate_band < 1.0))
        throw ConfigError("degenerate_band must lie in (0, 1)", 0, "degenerate_band");
    if (!(degenerate_fraction > 0.0 && degenerate_fraction <= 1.0))
        throw ConfigError("degenerate_fraction must lie in (0, 1]", 0, "degenerate_fraction");
    if (!(min_offset_spread >= 0.0 && min_offset_spread < 1.0))
        throw ConfigError("min_offset_spread must lie in [0, 1)", 0, "min_offset_spread");
}

double phase_distance(const Phase& a, const Phase& b, const std::array<bool, 4>& angular) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
        double d = a[i] - b[i];
        if (angular[i]) d = wrap_angle(d);
        s += d * d;
    }
    return std::sqrt(s);
}

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

double cloud_diameter(const SectionCloud& cloud) {
    const auto& pts = cloud.points;
    const auto& ang = cloud.plane.angular;
    double d = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, phase_distance(pts[i], pts[j], ang));
    return d;
}

double median_of(std::vector<double> xs) {
    const std::size_t n = xs.size();
    const auto mid = xs.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(xs.begin(), mid, xs.end());
    if (n % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(xs.begin(), mid);
    return 0.5 * (lower + upper);
}

double median_nearest_neighbor(const SectionCloud& cloud) {
    const auto& pts = cloud.points;
    const auto& ang = cloud.plane.angular;
    const std::size_t n = pts.size();
    if (n < 2) return 0.0;
    std::vector<double> nn(n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = phase_distance(pts[i], pts[j], ang);
            nn[i] = std::min(nn[i], d);
            nn[j] = std::min(nn[j], d);
        }
    return median_of(std::move(nn));
}

// Median |offset difference| between each point and its nearest neighbour,
// with distances measured across the slab direction removed. Dense clouds
// are thinned to about kSpreadSample points first: once neighbours are
// closer than the band a genuine curve occupies, their offsets correlate
// and the statistic would shrink with trajectory length.
double neighbor_offset_spread(const SectionCloud& cloud) {
    constexpr std::size_t kSpreadSample = 200;
    const std::size_t n_all = cloud.size();
    if (n_all < 2) return 0.0;

    // Every k-th point in (offset, time) order: independent of the order of
    // the point list and of rotations inside the plane.
    std::vector<std::size_t> idx(n_all);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const std::size_t stride = (n_all + kSpreadSample - 1) / kSpreadSample;
    if (stride > 1) {
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            if (cloud.slab_offsets[a] != cloud.slab_offsets[b]) return cloud.slab_offsets[a] < cloud.slab_offsets[b];
            return cloud.times[a] < cloud.times[b];
        });
        std::vector<std::size_t> kept;
        for (std::size_t k = 0; k < n_all; k += stride) kept.push_back(idx[k]);
        idx = std::move(kept);
    }

    const auto& ang = cloud.plane.angular;
    const auto& g = cloud.plane.slab.coeffs;
    const double grad2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2] + g[3] * g[3];
    const std::size_t n = idx.size();
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> nn(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = phase_distance(cloud.points[idx[i]], cloud.points[idx[j]], ang);
            const double dg = cloud.slab_offsets[idx[i]] - cloud.slab_offsets[idx[j]];
            const double d2 = std::max(d * d - dg * dg / grad2, 0.0);
            if (d2 < best[i]) {
                best[i] = d2;
                nn[i] = j;
            }
            if (d2 < best[j]) {
                best[j] = d2;
                nn[j] = i;
            }
        }
    std::vector<double> diffs(n);
    for (std::size_t i = 0; i < n; ++i)
        diffs[i] = std::abs(cloud.slab_offsets[idx[i]] - cloud.slab_offsets[idx[nn[i]]]);
    return median_of(std::move(diffs));
}

} // namespace

std::vector<Cluster> cluster(const SectionCloud& cloud, double delta) {
    const auto& pts = cloud.points;
    const auto& ang = cloud.plane.angular;
    const std::size_t n = pts.size();
    DisjointSets sets(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (phase_distance(pts[i], pts[j], ang) < delta) sets.unite(i, j);

    std::vector<Cluster> clusters;
    std::vector<std::size_t> slot(n, std::numeric_limits<std::size_t>::max());
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = sets.find(i);
        if (slot[root] == std::numeric_limits<std::size_t>::max()) {
            slot[root] = clusters.size();
            clusters.emplace_back();
        }
        clusters[slot[root]].members.push_back(i);
    }
    for (Cluster& c : clusters) {
        double d = 0.0;
        for (std::size_t a = 0; a < c.members.size(); ++a)
            for (std::size_t b = a + 1; b < c.members.size(); ++b)
                d = std::max(d, phase_distance(pts[c.members[a]], pts[c.members[b]], ang));
        c.diameter = d;
    }
    return clusters;
}

DimensionEstimate correlation_dimension(const SectionCloud& cloud) {
    constexpr std::size_t kRadii = 16;
    const auto& pts = cloud.points;
    const auto& ang = cloud.plane.angular;
    const std::size_t n = pts.size();

    DimensionEstimate est;
    est.r_lo = 3.0 * cloud.plane.slab_halfwidth;
    est.r_hi = cloud_diameter(cloud) / 4.0;
    if (n < 2 || !(est.r_hi > est.r_lo))
        throw DegenerateWindow("correlation window [3 slab, diameter/4] is empty");

    std::array<double, kRadii> radii;
    const double log_lo = std::log(est.r_lo);
    const double log_step = (std::log(est.r_hi) - log_lo) / static_cast<double>(kRadii - 1);
    for (std::size_t k = 0; k < kRadii; ++k) radii[k] = std::exp(log_lo + log_step * static_cast<double>(k));

    // counts[k] = number of pairs with radii[k-1] <= d < radii[k]
    std::array<std::size_t, kRadii + 1> counts{};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = phase_distance(pts[i], pts[j], ang);
            const auto pos = std::upper_bound(radii.begin(), radii.end(), d) - radii.begin();
            ++counts[static_cast<std::size_t>(pos)];
        }

    std::vector<double> xs, ys;
    std::size_t cumulative = 0;
    for (std::size_t k = 0; k < kRadii; ++k) {
        cumulative += counts[k];
        if (cumulative == 0) continue;
        xs.push_back(std::log(radii[k]));
        ys.push_back(std::log(static_cast<double>(cumulative)));
    }
    est.radii_used = xs.size();
    if (xs.size() < 2) return est;

    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxy += (xs[k] - mx) * (ys[k] - my);
        sxx += (xs[k] - mx) * (xs[k] - mx);
    }
    est.slope = sxy / sxx;
    return est;
}

Verdict classify(const SectionCloud& cloud, const ClassifierConfig& cfg) {
    Verdict v;
    v.n_points = cloud.size();
    v.correlation_dimension = std::numeric_limits<double>::quiet_NaN();
    if (v.n_points < cfg.n_min) {
        v.label = VerdictLabel::Empty;
        return v;
    }

    const double eps = cloud.plane.slab_halfwidth;
    const auto near_centre = static_cast<std::size_t>(
        std::count_if(cloud.slab_offsets.begin(), cloud.slab_offsets.end(),
                      [&](double g) { return std::abs(g) <= cfg.degenerate_band * eps; }));
    v.degenerate_plane = static_cast<double>(near_centre) >=
                         cfg.degenerate_fraction * static_cast<double>(v.n_points);

    v.delta_used = std::max(cfg.link_factor * median_nearest_neighbor(cloud), 1e-6 * eps);
    const auto clusters = cluster(cloud, v.delta_used);
    v.n_clusters = clusters.size();
    for (const Cluster& c : clusters) v.max_cluster_diameter = std::max(v.max_cluster_diameter, c.diameter);

    bool have_dimension = true;
    try {
        v.correlation_dimension = correlation_dimension(cloud).slope;
    } catch (const DegenerateWindow&) {
        have_dimension = false;
    }

    if (v.degenerate_plane) {
        v.label = VerdictLabel::Inconclusive;
        return v;
    }
    const bool compact = v.max_cluster_diameter <= cfg.point_diam_factor * eps;
    if (!have_dimension) {
        v.label = compact ? VerdictLabel::Points : VerdictLabel::Inconclusive;
        return v;
    }
    if (v.max_cluster_diameter > cfg.curve_diam_factor * eps && v.correlation_dimension >= cfg.dim_hi) {
        v.offset_spread = neighbor_offset_spread(cloud) / eps;
        if (v.offset_spread >= cfg.min_offset_spread) {
            v.label = VerdictLabel::Curves;
        } else {
            v.degenerate_plane = true;
            v.label = VerdictLabel::Inconclusive;
        }
    } else if (compact && v.correlation_dimension <= cfg.dim_lo)
        v.label = VerdictLabel::Points;
    else
        v.label = VerdictLabel::Inconclusive;
    return v;
}

Verdict classify_half_slab(const SectionCloud& cloud, const ClassifierConfig& cfg) {
    ClassifierConfig half = cfg;
    half.curve_diam_factor *= 2.0;
    return classify(restrict_slab(cloud, 0.5 * cloud.plane.slab_halfwidth), half);
}

bool non_integrability_witness(std::span<const Verdict> verdicts) {
    return std::any_of(verdicts.begin(), verdicts.end(),
                       [](const Verdict& v) { return v.label == VerdictLabel::Curves; });
}

} // namespace sectopo
