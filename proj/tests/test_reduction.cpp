#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sectopo/errors.hpp"
#include "sectopo/kamscan.hpp"
#include "sectopo/reduction.hpp"

using namespace sectopo;

namespace {

constexpr double pi = std::numbers::pi;

CartesianState rotated(const CartesianState& s, double phi, double omega) {
    const Eigen::Rotation2Dd rot(phi);
    const Eigen::Matrix2d J{{0, -1}, {1, 0}};
    CartesianState out = s;
    for (int j = 0; j < 3; ++j) {
        out.r[j] = rot * s.r[j];
        out.v[j] = rot * s.v[j] + omega * J * (rot * s.r[j]);
    }
    return out;
}

} // namespace

TEST_CASE("wrap_angle lands in (-pi, pi]") {
    CHECK(wrap_angle(0.0) == 0.0);
    CHECK(wrap_angle(pi) == doctest::Approx(pi));
    CHECK(wrap_angle(-pi) == doctest::Approx(pi));
    CHECK(wrap_angle(3 * pi / 2) == doctest::Approx(-pi / 2));
    CHECK(wrap_angle(-7.0) == doctest::Approx(-7.0 + 2 * pi));
    for (double x = -20.0; x < 20.0; x += 0.37) {
        const double w = wrap_angle(x);
        CHECK(w > -pi);
        CHECK(w <= pi);
        CHECK(std::remainder(w - x, 2 * pi) == doctest::Approx(0.0).scale(1.0));
    }
}

TEST_CASE("segment angles of a hand-built chain") {
    PendulumParams p;
    SegmentAngles a{{0.0, pi / 2, pi}, {0.5, -0.25, 1.0}};
    const CartesianState s = state_from_angles(p, a);
    CHECK((s.r[0] - Vec2(1, 0)).norm() < 1e-14);
    CHECK((s.r[1] - Vec2(1, 1)).norm() < 1e-14);
    CHECK((s.r[2] - Vec2(0, 1)).norm() < 1e-14);
    const ReducedState rs = reduce(p, s);
    CHECK(rs.beta1 == doctest::Approx(pi / 2));
    CHECK(rs.beta2 == doctest::Approx(pi / 2));
    CHECK(rs.beta1_dot == doctest::Approx(-0.75));
    CHECK(rs.beta2_dot == doctest::Approx(1.25));
}

TEST_CASE("reduce and embed are inverse") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        PendulumParams p;
        SampleRng rng(seed);
        p.eps1 = rng.uniform01();
        p.eps2 = rng.uniform01();
        p.lengths = {rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)};
        const CartesianState s = sample_initial_state(p, rng, 1.5);
        const ReducedState rs = reduce(p, s);
        const SegmentAngles a = segment_angles(p, s);
        const CartesianState back = embed(p, rs, a.angle[0], a.rate[0]);
        for (int j = 0; j < 3; ++j) {
            CHECK((back.r[j] - s.r[j]).norm() < 1e-9);
            CHECK((back.v[j] - s.v[j]).norm() < 1e-9);
        }
        const ReducedState again = reduce(p, back);
        CHECK(std::abs(wrap_angle(again.beta1 - rs.beta1)) < 1e-12);
        CHECK(std::abs(wrap_angle(again.beta2 - rs.beta2)) < 1e-12);
        CHECK(again.beta1_dot == doctest::Approx(rs.beta1_dot).scale(1.0));
        CHECK(again.beta2_dot == doctest::Approx(rs.beta2_dot).scale(1.0));
    }
}

TEST_CASE("reduction is invariant under rigid rotation") {
    PendulumParams p;
    p.eps1 = 0.6;
    p.eps2 = 0.9;
    SampleRng rng(3);
    const CartesianState s = sample_initial_state(p, rng, 1.0);
    const ReducedState rs = reduce(p, s);
    for (double phi : {0.3, -2.0, 3.1}) {
        for (double omega : {0.0, 0.7}) {
            const ReducedState q = reduce(p, rotated(s, phi, omega));
            CHECK(std::abs(wrap_angle(q.beta1 - rs.beta1)) < 1e-12);
            CHECK(std::abs(wrap_angle(q.beta2 - rs.beta2)) < 1e-12);
            CHECK(q.beta1_dot == doctest::Approx(rs.beta1_dot).scale(1.0));
            CHECK(q.beta2_dot == doctest::Approx(rs.beta2_dot).scale(1.0));
        }
    }
}

TEST_CASE("reduction needs the free system") {
    PendulumParams p;
    p.gravity = 9.81;
    SampleRng rng(1);
    const CartesianState s = sample_initial_state(p, rng, 1.0);
    CHECK_THROWS_AS(reduce(p, s), ReductionInvalid);
}

TEST_CASE("zero-length segment is degenerate") {
    PendulumParams p;
    CartesianState s;
    s.r = {Vec2(1, 0), Vec2(1, 0), Vec2(1, 1)};
    CHECK_THROWS_AS(segment_angles(p, s), DegenerateSegment);
}
