#pragma once

#include <array>

#include <Eigen/Dense>

namespace sectopo {

using Vec2 = Eigen::Vector2d;

/// Planar pendulum-type chain. Segment i+1 is hinged at the fraction eps_i
/// along segment i; eps = (1, 1) is the ordinary triple pendulum and
/// eps1 = 0 decouples the first mass from the rest.
struct PendulumParams {
    std::array<double, 3> lengths{1.0, 1.0, 1.0};
    std::array<double, 3> masses{1.0, 1.0, 1.0};
    double eps1 = 1.0;
    double eps2 = 1.0;
    double gravity = 0.0;

    /// Throws ConfigError when a length or mass is not positive or an
    /// attachment fraction leaves [0, 1].
    void validate() const;

    /// Coefficients c(i, j) such that segment i is sum_j c(i, j) r_j.
    /// Every constraint is |segment_i|^2 - l_i^2 = 0.
    Eigen::Matrix3d segment_coefficients() const;
};

struct CartesianState {
    double t = 0.0;
    std::array<Vec2, 3> r{Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
    std::array<Vec2, 3> v{Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
};

using ConstraintJacobian = Eigen::Matrix<double, 3, 6>;

struct PendulumAcceleration {
    std::array<Vec2, 3> a;
    Eigen::Vector3d lambda;
};

inline constexpr double kDefaultBaumgarteGamma = 10.0;

/// Segment vectors (r1 - r0, r2 - attach2, r3 - attach3) and their rates.
std::array<Vec2, 3> segment_vectors(const PendulumParams& p, const CartesianState& s);
std::array<Vec2, 3> segment_rates(const PendulumParams& p, const CartesianState& s);

Eigen::Vector3d constraint_values(const PendulumParams& p, const CartesianState& s);

/// d(phi)/dt = J v.
Eigen::Vector3d constraint_rates(const PendulumParams& p, const CartesianState& s);

ConstraintJacobian constraint_jacobian(const PendulumParams& p, const CartesianState& s);

/// Accelerations of the three masses from the Lagrange-multiplier form of the
/// constrained equations, with Baumgarte feedback
///   d2(phi)/dt2 = -2 gamma d(phi)/dt - gamma^2 phi.
/// Throws SingularConstraintSystem when J M^-1 J^T cannot be inverted.
PendulumAcceleration pendulum_rhs(const PendulumParams& p, const CartesianState& s,
                                  double baumgarte_gamma = kDefaultBaumgarteGamma);

double pendulum_energy(const PendulumParams& p, const CartesianState& s);
double pendulum_angular_momentum(const PendulumParams& p, const CartesianState& s);

// ---------------------------------------------------------------------------
// Dynamically symmetric satellite on a circular orbit.

enum class SatelliteForm {
    /// Full Euler-angle Hamiltonian with p_phi = alpha * beta eliminated.
    General,
    /// Two-degree-of-freedom Hamiltonian quoted for alpha = 4/3, beta = 0:
    ///   H = p_psi^2 / (2 sin^2 theta) + p_theta^2 / 2 - p_psi
    ///       + sin^2 psi sin^2 theta / 2.
    Reduced,
};

struct SatelliteParams {
    double alpha = 4.0 / 3.0;
    double beta = 0.0;
    SatelliteForm form = SatelliteForm::Reduced;

    double p_phi() const { return alpha * beta; }

    /// alpha > 0; the Reduced form is only defined at alpha = 4/3, beta = 0.
    void validate() const;

    static SatelliteParams reduced() { return {}; }
    static SatelliteParams general(double alpha, double beta) {
        return {alpha, beta, SatelliteForm::General};
    }
};

struct SatelliteState {
    double psi = 0.0;
    double theta = 0.0;
    double p_psi = 0.0;
    double p_theta = 0.0;
};

inline constexpr double kThetaMin = 1e-8;

/// Throws CoordinateSingularity when |sin theta| < kThetaMin.
double satellite_hamiltonian(const SatelliteParams& p, const SatelliteState& s);

/// Hamilton's equations: (dpsi/dt, dtheta/dt, dp_psi/dt, dp_theta/dt).
SatelliteState satellite_rhs(const SatelliteParams& p, const SatelliteState& s);

} // namespace sectopo
