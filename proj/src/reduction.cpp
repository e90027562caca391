#include "sectopo/reduction.hpp"

#include <cmath>
#include <numbers>

#include "sectopo/errors.hpp"

namespace sectopo {

double wrap_angle(double x) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double w = std::remainder(x, two_pi);
    if (w <= -std::numbers::pi) w += two_pi;
    return w;
}

SegmentAngles segment_angles(const PendulumParams& p, const CartesianState& s) {
    const auto d = segment_vectors(p, s);
    const auto dd = segment_rates(p, s);
    SegmentAngles out;
    for (int i = 0; i < 3; ++i) {
        const double n2 = d[i].squaredNorm();
        if (!(n2 >= 1e-24)) throw DegenerateSegment("segment has (near) zero length");
        out.angle[i] = std::atan2(d[i].y(), d[i].x());
        out.rate[i] = (d[i].x() * dd[i].y() - d[i].y() * dd[i].x()) / n2;
    }
    return out;
}

ReducedState reduce(const PendulumParams& p, const CartesianState& s) {
    if (p.gravity != 0.0)
        throw ReductionInvalid("reduction requires rotation invariance (gravity = 0)");
    const SegmentAngles a = segment_angles(p, s);
    return {wrap_angle(a.angle[1] - a.angle[0]), wrap_angle(a.angle[2] - a.angle[1]),
            a.rate[1] - a.rate[0], a.rate[2] - a.rate[1]};
}

CartesianState state_from_angles(const PendulumParams& p, const SegmentAngles& a, double t) {
    std::array<Vec2, 3> d, dd;
    for (int i = 0; i < 3; ++i) {
        const double c = std::cos(a.angle[i]);
        const double sn = std::sin(a.angle[i]);
        d[i] = p.lengths[i] * Vec2(c, sn);
        dd[i] = p.lengths[i] * a.rate[i] * Vec2(-sn, c);
    }
    // r1 = d1, r2 = d2 + eps1 r1, r3 = d3 + eps1 r1 + eps2 d2
    CartesianState s;
    s.t = t;
    s.r[0] = d[0];
    s.r[1] = d[1] + p.eps1 * s.r[0];
    s.r[2] = d[2] + p.eps1 * s.r[0] + p.eps2 * d[1];
    s.v[0] = dd[0];
    s.v[1] = dd[1] + p.eps1 * s.v[0];
    s.v[2] = dd[2] + p.eps1 * s.v[0] + p.eps2 * dd[1];
    return s;
}

CartesianState embed(const PendulumParams& p, const ReducedState& rs, double alpha1,
                     double alpha1_dot) {
    SegmentAngles a;
    a.angle = {alpha1, alpha1 + rs.beta1, alpha1 + rs.beta1 + rs.beta2};
    a.rate = {alpha1_dot, alpha1_dot + rs.beta1_dot, alpha1_dot + rs.beta1_dot + rs.beta2_dot};
    return state_from_angles(p, a);
}

} // namespace sectopo
