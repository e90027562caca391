#pragma once

#include <array>

#include "sectopo/systems.hpp"

namespace sectopo {

/// Point of the 4-dimensional reduced phase space: relative segment angles
/// and their rates. Angles are kept in (-pi, pi].
struct ReducedState {
    double beta1 = 0.0;
    double beta2 = 0.0;
    double beta1_dot = 0.0;
    double beta2_dot = 0.0;

    std::array<double, 4> as_array() const { return {beta1, beta2, beta1_dot, beta2_dot}; }
};

/// Maps x into (-pi, pi].
double wrap_angle(double x);

struct SegmentAngles {
    std::array<double, 3> angle;
    std::array<double, 3> rate;
};

/// Absolute angle of each segment and its angular velocity. Throws
/// DegenerateSegment for a segment shorter than 1e-12.
SegmentAngles segment_angles(const PendulumParams& p, const CartesianState& s);

/// Quotient by the rotation about the fixed point. Only defined for the free
/// system; throws ReductionInvalid when gravity is non-zero.
ReducedState reduce(const PendulumParams& p, const CartesianState& s);

/// On-manifold Cartesian state with the given absolute segment angles and rates.
CartesianState state_from_angles(const PendulumParams& p, const SegmentAngles& angles,
                                 double t = 0.0);

/// Inverse of reduce for a chosen absolute angle (and rate) of segment 1.
CartesianState embed(const PendulumParams& p, const ReducedState& rs, double alpha1,
                     double alpha1_dot);

} // namespace sectopo
