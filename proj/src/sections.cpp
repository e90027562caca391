#include "sectopo/sections.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "sectopo/errors.hpp"

namespace sectopo {

PhaseLayout PhaseLayout::pendulum() {
    return {{"beta1", "beta2", "beta1_dot", "beta2_dot"}, {true, true, false, false}};
}

PhaseLayout PhaseLayout::satellite() {
    return {{"psi", "theta", "p_psi", "p_theta"}, {true, false, false, false}};
}

double LinearFunctional::tolerance_scale() const {
    double c = 0.0;
    for (double v : coeffs) c = std::max(c, std::abs(v));
    return std::max(1.0, std::abs(offset)) * std::max(1.0, c);
}

namespace {

using Mat24 = Eigen::Matrix<double, 2, 4>;
using Vec4 = Eigen::Vector4d;

Mat24 coefficient_rows(const PlaneSpec& p) {
    Mat24 a;
    for (int i = 0; i < 4; ++i) {
        a(0, i) = p.event.coeffs[i];
        a(1, i) = p.slab.coeffs[i];
    }
    return a;
}

Phase to_phase(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

void PlaneSpec::validate() const {
    if (!(slab_halfwidth > 0.0))
        throw ConfigError("slab half-width must be positive", 0, "slab_halfwidth");
    const Mat24 a = coefficient_rows(*this);
    if (!a.allFinite() || !std::isfinite(event.offset) || !std::isfinite(slab.offset))
        throw ConfigError("plane coefficients must be finite");
    Eigen::JacobiSVD<Mat24> svd(a);
    const auto sv = svd.singularValues();
    if (!(sv[0] > 0.0) || sv[1] <= 1e-12 * sv[0])
        throw ConfigError("plane equations must be linearly independent (rank 2)");
}

Phase PlaneSpec::anchor() const {
    const Mat24 a = coefficient_rows(*this);
    const Eigen::Vector2d e(event.offset, slab.offset);
    const Eigen::Matrix2d gram = a * a.transpose();
    return to_phase(a.transpose() * gram.ldlt().solve(e));
}

Phase PlaneSpec::canonical(const Phase& x) const { return detail::lift_near(x, anchor(), angular); }

std::array<Phase, 2> PlaneSpec::basis() const {
    const Mat24 a = coefficient_rows(*this);
    const Eigen::Matrix4d proj =
        Eigen::Matrix4d::Identity() - a.transpose() * (a * a.transpose()).inverse() * a;

    std::array<int, 4> order{0, 1, 2, 3};
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
        return std::abs(a(0, i)) + std::abs(a(1, i)) < std::abs(a(0, j)) + std::abs(a(1, j));
    });

    std::vector<Vec4> basis;
    const auto gram_schmidt = [&](int axis) {
        Vec4 v = proj.col(axis);
        for (const Vec4& b : basis) v -= b.dot(v) * b;
        const double n = v.norm();
        if (n > 1e-8) basis.push_back(v / n);
    };
    gram_schmidt(std::min(order[0], order[1]));
    gram_schmidt(std::max(order[0], order[1]));
    for (int k = 2; k < 4 && basis.size() < 2; ++k) gram_schmidt(order[k]);
    return {to_phase(basis[0]), to_phase(basis[1])};
}

std::vector<PlaneSpec> default_planes(const Phase& reference, const PhaseLayout& layout,
                                      double slab_halfwidth) {
    std::vector<PlaneSpec> planes;
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            PlaneSpec p;
            p.event.coeffs[i] = 1.0;
            p.event.offset = reference[i];
            p.slab.coeffs[j] = 1.0;
            p.slab.offset = reference[j];
            p.slab_halfwidth = slab_halfwidth;
            p.angular = layout.angular;
            p.label = "(" + layout.names[i] + " = " + format_value(reference[i]) + ", " +
                      layout.names[j] + " = " + format_value(reference[j]) + ")";
            std::array<int, 2> free{};
            int n = 0;
            for (int k = 0; k < 4; ++k)
                if (k != i && k != j) free[n++] = k;
            p.axis_labels = {layout.names[free[0]], layout.names[free[1]]};
            planes.push_back(std::move(p));
        }
    }
    return planes;
}

PlanePoint plane_coords(const Phase& point, const PlaneSpec& plane) {
    const Phase anchor = plane.anchor();
    const auto basis = plane.basis();
    Phase d;
    for (int i = 0; i < 4; ++i) {
        d[i] = point[i] - anchor[i];
        if (plane.angular[i]) d[i] = wrap_angle(d[i]);
    }
    PlanePoint out{0.0, 0.0};
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 4; ++i) out[k] += basis[k][i] * d[i];
    return out;
}

void SectionCloud::add(double t, const Phase& point) {
    const double f1 = plane.event(point);
    const double f2 = plane.slab(point);
    if (!(std::abs(f1) <= 1e-12 * plane.event.tolerance_scale()) ||
        !(std::abs(f2) <= plane.slab_halfwidth))
        throw std::logic_error("section point violates the plane bounds");
    points.push_back(point);
    plane_coords.push_back(sectopo::plane_coords(point, plane));
    times.push_back(t);
    slab_offsets.push_back(f2);
}

SectionCloud restrict_slab(const SectionCloud& cloud, double new_halfwidth) {
    SectionCloud out;
    out.plane = cloud.plane;
    out.plane.slab_halfwidth = new_halfwidth;
    out.crossings_tested = cloud.crossings_tested;
    out.trajectory_time = cloud.trajectory_time;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (std::abs(cloud.slab_offsets[i]) > new_halfwidth) continue;
        out.points.push_back(cloud.points[i]);
        out.plane_coords.push_back(cloud.plane_coords[i]);
        out.times.push_back(cloud.times[i]);
        out.slab_offsets.push_back(cloud.slab_offsets[i]);
    }
    return out;
}

namespace detail {

Phase lift_near(const Phase& x, const Phase& ref, const std::array<bool, 4>& angular) {
    Phase out = x;
    for (int i = 0; i < 4; ++i)
        if (angular[i]) out[i] = ref[i] + wrap_angle(x[i] - ref[i]);
    return out;
}

} // namespace detail

std::optional<Crossing> detect_crossing(const std::function<Phase(double)>& phase_at, double t0,
                                        double h, const Phase& start, const Phase& end,
                                        const LinearFunctional& f,
                                        const std::array<bool, 4>& angular, double loc_tol) {
    const Phase lifted_end = detail::lift_near(end, start, angular);
    double f_lo = f(start);
    const double f_hi = f(lifted_end);
    if (!((f_lo < 0.0 && f_hi >= 0.0) || (f_lo > 0.0 && f_hi <= 0.0))) return std::nullopt;
    if (std::abs(f_hi) <= loc_tol) return Crossing{t0 + h, lifted_end};

    double lo = 0.0;
    double hi = 1.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        const Phase x = detail::lift_near(phase_at(mid), start, angular);
        const double fm = f(x);
        if (std::abs(fm) <= loc_tol) return Crossing{t0 + mid * h, x};
        if ((fm < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    return std::nullopt;
}

} // namespace sectopo
