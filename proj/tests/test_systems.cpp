#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sectopo/errors.hpp"
#include "sectopo/kamscan.hpp"
#include "sectopo/reduction.hpp"
#include "sectopo/systems.hpp"

using namespace sectopo;

namespace {

CartesianState random_state(const PendulumParams& p, std::uint64_t seed) {
    SampleRng rng(seed);
    return sample_initial_state(p, rng, 1.0);
}

// Both Hamiltonians written out by hand, independently of the library.
double hand_full_h(double a, double b, double psi, double th, double pp, double pt) {
    const double s = std::sin(th), c = std::cos(th);
    return pp * pp / (2 * s * s) + pt * pt / 2 - pp * (c / s) * std::cos(psi) - a * b * pp * c / (s * s) -
           pt * std::sin(psi) + a * b * std::cos(psi) / s + a * a * b * b / (2 * s * s) + 1.5 * (a - 1) * c * c;
}

double hand_reduced_h(double psi, double th, double pp, double pt) {
    const double s = std::sin(th);
    return pp * pp / (2 * s * s) + pt * pt / 2 - pp + 0.5 * std::sin(psi) * std::sin(psi) * s * s;
}

} // namespace

TEST_CASE("segment coefficients follow the attachment fractions") {
    PendulumParams p;
    p.eps1 = 0.3;
    p.eps2 = 0.6;
    const auto c = p.segment_coefficients();
    CHECK(c(0, 0) == 1.0);
    CHECK(c(1, 0) == doctest::Approx(-0.3));
    CHECK(c(2, 0) == doctest::Approx(-0.3 * 0.4));
    CHECK(c(2, 1) == doctest::Approx(-0.6));
    CHECK(c(0, 1) == 0.0);
}

TEST_CASE("parameter validation") {
    PendulumParams p;
    p.eps1 = 1.5;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.eps1 = 1.0;
    p.lengths[1] = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    SatelliteParams s = SatelliteParams::reduced();
    CHECK_NOTHROW(s.validate());
    s.beta = 0.1;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    CHECK_NOTHROW(SatelliteParams::general(1.2, 0.4).validate());
}

TEST_CASE("constraint jacobian matches central differences") {
    PendulumParams p;
    p.eps1 = 0.4;
    p.eps2 = 0.7;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        CartesianState s = random_state(p, seed);
        s.r[1] += Vec2(0.1, -0.2);  // off the manifold on purpose
        const auto J = constraint_jacobian(p, s);
        const double h = 1e-6;
        for (int k = 0; k < 3; ++k)
            for (int a = 0; a < 2; ++a) {
                CartesianState sp = s, sm = s;
                sp.r[k][a] += h;
                sm.r[k][a] -= h;
                const Eigen::Vector3d fd = (constraint_values(p, sp) - constraint_values(p, sm)) / (2 * h);
                for (int i = 0; i < 3; ++i) CHECK(J(i, 2 * k + a) == doctest::Approx(fd[i]).epsilon(1e-7));
            }
    }
}

TEST_CASE("accelerations keep segment lengths to second order on the manifold") {
    PendulumParams p;
    p.eps1 = 0.8;
    p.eps2 = 0.3;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const CartesianState s = random_state(p, seed);
        const auto acc = pendulum_rhs(p, s);
        const auto d = segment_vectors(p, s);
        const auto dd = segment_rates(p, s);
        const auto C = p.segment_coefficients();
        for (int i = 0; i < 3; ++i) {
            Vec2 ddd = Vec2::Zero();
            for (int j = 0; j < 3; ++j) ddd += C(i, j) * acc.a[j];
            // d/dt^2 |d|^2 / 2 = d . d'' + |d'|^2 = 0
            CHECK(d[i].dot(ddd) + dd[i].squaredNorm() == doctest::Approx(0.0).epsilon(1e-9).scale(1.0));
        }
    }
}

TEST_CASE("straight chain in rigid rotation accelerates centripetally") {
    PendulumParams p;  // eps = 1: the plain triple pendulum
    const double omega = 0.7;
    const Vec2 e(std::cos(0.4), std::sin(0.4));
    CartesianState s;
    for (int k = 0; k < 3; ++k) {
        s.r[k] = (k + 1.0) * e;
        s.v[k] = omega * Vec2(-s.r[k].y(), s.r[k].x());
    }
    const auto acc = pendulum_rhs(p, s);
    for (int k = 0; k < 3; ++k) {
        CHECK(acc.a[k].x() == doctest::Approx(-omega * omega * s.r[k].x()).epsilon(1e-10));
        CHECK(acc.a[k].y() == doctest::Approx(-omega * omega * s.r[k].y()).epsilon(1e-10));
    }
}

TEST_CASE("eps1 = 0 decouples the first segment into a free rotor") {
    PendulumParams p;
    p.eps1 = 0.0;
    p.eps2 = 0.5;
    const CartesianState s = random_state(p, 11);
    const auto acc = pendulum_rhs(p, s);
    const double w2 = s.v[0].squaredNorm() / s.r[0].squaredNorm();
    CHECK(acc.a[0].x() == doctest::Approx(-w2 * s.r[0].x()).epsilon(1e-9));
    CHECK(acc.a[0].y() == doctest::Approx(-w2 * s.r[0].y()).epsilon(1e-9));
}

TEST_CASE("accelerations conserve energy and angular momentum instantaneously") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        PendulumParams p;
        p.eps1 = 0.1 * static_cast<double>(seed - 1);
        p.eps2 = 1.0 - 0.07 * static_cast<double>(seed);
        p.masses = {1.0, 0.5 + 0.1 * static_cast<double>(seed), 2.0};
        const CartesianState s = random_state(p, seed);
        const auto acc = pendulum_rhs(p, s);
        double dE = 0.0, dL = 0.0;
        for (int k = 0; k < 3; ++k) {
            dE += p.masses[k] * s.v[k].dot(acc.a[k]);
            dL += p.masses[k] * (s.r[k].x() * acc.a[k].y() - s.r[k].y() * acc.a[k].x());
        }
        CHECK(std::abs(dE) <= 1e-10);
        CHECK(std::abs(dL) <= 1e-10);
    }
}

TEST_CASE("eps1 = 0: the rotor and the rest do not feel each other") {
    PendulumParams p;
    p.eps1 = 0.0;
    p.eps2 = 0.6;
    const CartesianState s = random_state(p, 21);
    const auto base = pendulum_rhs(p, s);

    CartesianState moved_first = s;  // rotor turned and spun differently
    const Eigen::Rotation2Dd rot(1.1);
    moved_first.r[0] = rot * s.r[0];
    moved_first.v[0] = 0.3 * Vec2(-moved_first.r[0].y(), moved_first.r[0].x());
    const auto a1 = pendulum_rhs(p, moved_first);
    for (int k = 1; k < 3; ++k) CHECK((a1.a[k] - base.a[k]).norm() <= 1e-12);

    CartesianState moved_rest = s;  // rest of the chain rigidly rotated
    for (int k = 1; k < 3; ++k) {
        moved_rest.r[k] = rot * s.r[k];
        moved_rest.v[k] = rot * s.v[k];
    }
    const auto a2 = pendulum_rhs(p, moved_rest);
    CHECK((a2.a[0] - base.a[0]).norm() <= 1e-12);
}

TEST_CASE("energy and angular momentum of a hand-built state") {
    PendulumParams p;
    p.masses = {1.0, 2.0, 3.0};
    p.gravity = 9.81;
    CartesianState s;
    s.r = {Vec2(1, 0), Vec2(1, -1), Vec2(1, -2)};
    s.v = {Vec2(0, 1), Vec2(1, 1), Vec2(0, 0)};
    CHECK(pendulum_energy(p, s) == doctest::Approx(0.5 * 1 + 0.5 * 2 * 2 + 9.81 * (2 * -1 + 3 * -2)));
    CHECK(pendulum_angular_momentum(p, s) == doctest::Approx(1.0 * 1 + 2.0 * (1 * 1 - (-1) * 1)));
}

TEST_CASE("coincident attachment makes the constraint system singular") {
    PendulumParams p;
    CartesianState s;
    s.r = {Vec2(1, 0), Vec2(1, 0), Vec2(1, 1)};  // segment 2 has zero length
    CHECK_THROWS_AS(pendulum_rhs(p, s), SingularConstraintSystem);
}

TEST_CASE("satellite Hamiltonians agree with the transcribed formulas") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0), th(0.2, std::numbers::pi - 0.2);
    for (int k = 0; k < 50; ++k) {
        const SatelliteState x{u(rng), th(rng), u(rng), u(rng)};
        CHECK(satellite_hamiltonian(SatelliteParams::reduced(), x) ==
              doctest::Approx(hand_reduced_h(x.psi, x.theta, x.p_psi, x.p_theta)).epsilon(1e-13));
        const double a = 0.5 + std::abs(u(rng)), b = u(rng);
        CHECK(satellite_hamiltonian(SatelliteParams::general(a, b), x) ==
              doctest::Approx(hand_full_h(a, b, x.psi, x.theta, x.p_psi, x.p_theta)).epsilon(1e-13));
    }
}

TEST_CASE("the full Hamiltonian at alpha = 4/3, beta = 0 is not the reduced one") {
    const SatelliteState x{std::numbers::pi / 2, std::numbers::pi / 2, 0.0, 0.0};
    CHECK(satellite_hamiltonian(SatelliteParams::general(4.0 / 3.0, 0.0), x) == doctest::Approx(0.0));
    CHECK(satellite_hamiltonian(SatelliteParams::reduced(), x) == doctest::Approx(0.5));
}

TEST_CASE("satellite vector field is the symplectic gradient of H") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0), th(0.1, std::numbers::pi - 0.1);
    const double h = 1e-6;
    for (int k = 0; k < 100; ++k) {
        const SatelliteParams p = k % 2 ? SatelliteParams::reduced() : SatelliteParams::general(1.0 + std::abs(u(rng)), u(rng));
        const SatelliteState x{u(rng), th(rng), u(rng), u(rng)};
        const auto H = [&](SatelliteState y) { return satellite_hamiltonian(p, y); };
        auto shift = [&](double SatelliteState::*m, double d) {
            SatelliteState y = x;
            y.*m += d;
            return y;
        };
        const auto fd = [&](double SatelliteState::*m) { return (H(shift(m, h)) - H(shift(m, -h))) / (2 * h); };
        const SatelliteState f = satellite_rhs(p, x);
        CHECK(f.psi == doctest::Approx(fd(&SatelliteState::p_psi)).epsilon(1e-6));
        CHECK(f.theta == doctest::Approx(fd(&SatelliteState::p_theta)).epsilon(1e-6));
        CHECK(f.p_psi == doctest::Approx(-fd(&SatelliteState::psi)).epsilon(1e-6));
        CHECK(f.p_theta == doctest::Approx(-fd(&SatelliteState::theta)).epsilon(1e-6));
    }
}

TEST_CASE("satellite near the poles is a coordinate singularity") {
    const SatelliteState x{0.1, 1e-10, 0.1, 0.1};
    CHECK_THROWS_AS(satellite_rhs(SatelliteParams::reduced(), x), CoordinateSingularity);
}
