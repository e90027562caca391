#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sectopo/integrate.hpp"
#include "sectopo/reduction.hpp"

namespace sectopo {

/// A point of a 4-dimensional phase space.
using Phase = std::array<double, 4>;
using PlanePoint = std::array<double, 2>;

/// Names of the four phase coordinates and which of them are angles.
struct PhaseLayout {
    std::array<std::string, 4> names;
    std::array<bool, 4> angular{};

    /// (beta1, beta2, beta1_dot, beta2_dot)
    static PhaseLayout pendulum();
    /// (psi, theta, p_psi, p_theta); theta stays inside (0, pi) and is not wrapped.
    static PhaseLayout satellite();
};

/// coeffs . x - offset
struct LinearFunctional {
    std::array<double, 4> coeffs{};
    double offset = 0.0;

    double operator()(const Phase& x) const {
        return coeffs[0] * x[0] + coeffs[1] * x[1] + coeffs[2] * x[2] + coeffs[3] * x[3] - offset;
    }
    double tolerance_scale() const;
};

/// Two-dimensional affine plane {event = 0, slab = 0}. The trajectory is
/// cut exactly on the event hyperplane and the slab equation is accepted
/// within slab_halfwidth.
struct PlaneSpec {
    LinearFunctional event;
    LinearFunctional slab;
    double slab_halfwidth = 1e-3;
    std::array<bool, 4> angular{};
    std::string label;
    std::array<std::string, 2> axis_labels{"u", "v"};

    /// Rank-2 coefficient rows and a positive slab. Throws ConfigError.
    void validate() const;

    /// Least-norm point of the plane; angular coordinates are represented
    /// within pi of it.
    Phase anchor() const;
    Phase canonical(const Phase& x) const;
    /// Orthonormal basis of the plane's direction space.
    std::array<Phase, 2> basis() const;
};

/// The six planes parallel to coordinate 2-planes through `reference`: for
/// each pair i < j, {x_i = ref_i, x_j = ref_j}.
std::vector<PlaneSpec> default_planes(const Phase& reference, const PhaseLayout& layout,
                                      double slab_halfwidth = 1e-3);

PlanePoint plane_coords(const Phase& point, const PlaneSpec& plane);

struct SectionCloud {
    PlaneSpec plane;
    std::vector<Phase> points;
    std::vector<PlanePoint> plane_coords;
    std::vector<double> times;
    /// Value of the slab functional at each accepted point.
    std::vector<double> slab_offsets;
    std::size_t crossings_tested = 0;
    double trajectory_time = 0.0;

    std::size_t size() const { return points.size(); }
    void add(double t, const Phase& point);
};

/// Same crossings with a narrower slab.
SectionCloud restrict_slab(const SectionCloud& cloud, double new_halfwidth);

struct Crossing {
    double t = 0.0;
    Phase point{};
};

/// Values of |event| below this at both ends of a step are treated as
/// numerical noise of a trajectory lying inside the event hyperplane.
inline constexpr double kCrossingNoiseFloor = 1e-9;

/// Root of `f` along one integration step. `phase_at(s)` evaluates the phase
/// point at fraction s in [0, 1] of the step [t0, t0 + h]; angular coordinates
/// are lifted continuously from the start of the step so the +-pi seam never
/// produces a sign change. Returns the refined point (|f| <= loc_tol) on a sign
/// change of f, and nothing otherwise.
std::optional<Crossing> detect_crossing(const std::function<Phase(double)>& phase_at, double t0,
                                        double h, const Phase& start, const Phase& end,
                                        const LinearFunctional& f,
                                        const std::array<bool, 4>& angular, double loc_tol);

namespace detail {
/// Angular coordinates of x moved to within pi of ref.
Phase lift_near(const Phase& x, const Phase& ref, const std::array<bool, 4>& angular);
} // namespace detail

/// Observer that cuts a trajectory with several planes at once.
template <std::size_t N>
class SectionCollector {
public:
    using PhaseMap = std::function<Phase(const StateVec<N>&)>;

    SectionCollector(std::vector<PlaneSpec> planes, PhaseMap phase_map, const StateVec<N>& y0,
                     double t0, std::size_t max_points = 0)
        : map_(std::move(phase_map)), t0_(t0), max_points_(max_points), prev_(map_(y0)) {
        clouds_.reserve(planes.size());
        for (auto& p : planes) {
            p.validate();
            anchors_.push_back(p.anchor());
            SectionCloud c;
            c.plane = std::move(p);
            clouds_.push_back(std::move(c));
        }
    }

    /// Returns false once every plane holds max_points points.
    bool observe(const TrajectorySample<N>& sample, const DenseSegment<N>& dense) {
        const Phase next = map_(sample.state);
        const auto phase_at = [&](double s) { return map_(dense.eval_fraction(s)); };
        bool all_full = max_points_ > 0;
        for (std::size_t k = 0; k < clouds_.size(); ++k) {
            SectionCloud& cloud = clouds_[k];
            cloud.trajectory_time = sample.t - t0_;
            if (max_points_ > 0 && cloud.size() >= max_points_) continue;
            process_plane(cloud, anchors_[k], dense, phase_at, next);
            if (max_points_ == 0 || cloud.size() < max_points_) all_full = false;
        }
        prev_ = next;
        return !all_full;
    }

    Observer<N> observer() {
        return [this](const TrajectorySample<N>& s, const DenseSegment<N>& d) { return observe(s, d); };
    }

    const std::vector<SectionCloud>& clouds() const { return clouds_; }
    std::vector<SectionCloud> take_clouds() { return std::move(clouds_); }

private:
    template <class PhaseAt>
    void process_plane(SectionCloud& cloud, const Phase& anchor, const DenseSegment<N>& dense,
                       const PhaseAt& phase_at, const Phase& next) {
        const PlaneSpec& plane = cloud.plane;
        const Phase start = detail::lift_near(prev_, anchor, plane.angular);
        const Phase end = detail::lift_near(next, start, plane.angular);
        const double f0 = plane.event(start);
        const double f1 = plane.event(end);
        if (!((f0 < 0.0 && f1 >= 0.0) || (f0 > 0.0 && f1 <= 0.0))) return;
        if (std::max(std::abs(f0), std::abs(f1)) < kCrossingNoiseFloor) return;
        ++cloud.crossings_tested;

        // Both ends far outside the slab on the same side: no refinement needed.
        const double g0 = plane.slab(start);
        const double g1 = plane.slab(end);
        const double eps = plane.slab_halfwidth;
        if (g0 * g1 > 0.0 && std::min(std::abs(g0), std::abs(g1)) > 2.0 * eps + std::abs(g1 - g0))
            return;

        const auto crossing = detect_crossing(phase_at, dense.t0, dense.h, start, end, plane.event,
                                              plane.angular, 1e-12 * plane.event.tolerance_scale());
        if (!crossing) return;
        Phase x = crossing->point;
        for (int i = 0; i < 4; ++i)
            if (plane.angular[i] && plane.event.coeffs[i] == 0.0)
                x[i] = anchor[i] + wrap_angle(x[i] - anchor[i]);
        if (std::abs(plane.slab(x)) <= eps) cloud.add(crossing->t, x);
    }

    PhaseMap map_;
    double t0_;
    std::size_t max_points_;
    Phase prev_;
    std::vector<SectionCloud> clouds_;
    std::vector<Phase> anchors_;
};

} // namespace sectopo
