#include "sectopo/systems.hpp"

#include <cmath>
#include <string>

#include "sectopo/errors.hpp"

namespace sectopo {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

} // namespace

void PendulumParams::validate() const {
    for (int i = 0; i < 3; ++i) {
        if (!(lengths[i] > 0.0))
            throw ConfigError("length l" + std::to_string(i + 1) + " must be positive", 0, "lengths");
        if (!(masses[i] > 0.0))
            throw ConfigError("mass m" + std::to_string(i + 1) + " must be positive", 0, "masses");
    }
    if (!(eps1 >= 0.0 && eps1 <= 1.0)) throw ConfigError("eps1 must lie in [0, 1]", 0, "eps1");
    if (!(eps2 >= 0.0 && eps2 <= 1.0)) throw ConfigError("eps2 must lie in [0, 1]", 0, "eps2");
    if (!std::isfinite(gravity)) throw ConfigError("gravity must be finite", 0, "gravity");
}

Eigen::Matrix3d PendulumParams::segment_coefficients() const {
    // attach2 = eps1 r1, attach3 = eps1 r1 + eps2 (r2 - eps1 r1)
    Eigen::Matrix3d c;
    c << 1.0, 0.0, 0.0,
         -eps1, 1.0, 0.0,
         -eps1 * (1.0 - eps2), -eps2, 1.0;
    return c;
}

std::array<Vec2, 3> segment_vectors(const PendulumParams& p, const CartesianState& s) {
    const Eigen::Matrix3d c = p.segment_coefficients();
    std::array<Vec2, 3> d;
    for (int i = 0; i < 3; ++i) d[i] = c(i, 0) * s.r[0] + c(i, 1) * s.r[1] + c(i, 2) * s.r[2];
    return d;
}

std::array<Vec2, 3> segment_rates(const PendulumParams& p, const CartesianState& s) {
    const Eigen::Matrix3d c = p.segment_coefficients();
    std::array<Vec2, 3> d;
    for (int i = 0; i < 3; ++i) d[i] = c(i, 0) * s.v[0] + c(i, 1) * s.v[1] + c(i, 2) * s.v[2];
    return d;
}

Eigen::Vector3d constraint_values(const PendulumParams& p, const CartesianState& s) {
    const auto d = segment_vectors(p, s);
    Eigen::Vector3d phi;
    for (int i = 0; i < 3; ++i) phi[i] = d[i].squaredNorm() - p.lengths[i] * p.lengths[i];
    return phi;
}

Eigen::Vector3d constraint_rates(const PendulumParams& p, const CartesianState& s) {
    const auto d = segment_vectors(p, s);
    const auto dd = segment_rates(p, s);
    Eigen::Vector3d rate;
    for (int i = 0; i < 3; ++i) rate[i] = 2.0 * d[i].dot(dd[i]);
    return rate;
}

ConstraintJacobian constraint_jacobian(const PendulumParams& p, const CartesianState& s) {
    const Eigen::Matrix3d c = p.segment_coefficients();
    const auto d = segment_vectors(p, s);
    ConstraintJacobian jac;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) jac.block<1, 2>(i, 2 * j) = 2.0 * c(i, j) * d[i].transpose();
    return jac;
}

PendulumAcceleration pendulum_rhs(const PendulumParams& p, const CartesianState& s,
                                  double baumgarte_gamma) {
    const auto d = segment_vectors(p, s);
    const auto dd = segment_rates(p, s);
    const ConstraintJacobian jac = constraint_jacobian(p, s);

    Eigen::Matrix<double, 6, 1> inv_mass;
    Eigen::Matrix<double, 6, 1> force_over_mass;
    for (int j = 0; j < 3; ++j) {
        inv_mass.segment<2>(2 * j).setConstant(1.0 / p.masses[j]);
        force_over_mass.segment<2>(2 * j) = Vec2(0.0, -p.gravity);
    }

    // J a = -2 |dd_i|^2 - 2 gamma phi' - gamma^2 phi
    Eigen::Vector3d target;
    for (int i = 0; i < 3; ++i) {
        const double phi = d[i].squaredNorm() - p.lengths[i] * p.lengths[i];
        const double phi_dot = 2.0 * d[i].dot(dd[i]);
        target[i] = -2.0 * dd[i].squaredNorm() - 2.0 * baumgarte_gamma * phi_dot -
                    baumgarte_gamma * baumgarte_gamma * phi;
    }

    const Eigen::Matrix<double, 3, 6> jm = jac * inv_mass.asDiagonal();
    const Eigen::Matrix3d system = jm * jac.transpose();
    const Eigen::Vector3d rhs = target - jac * force_over_mass;

    Eigen::LDLT<Eigen::Matrix3d> ldlt(system);
    const Eigen::Vector3d diag = ldlt.vectorD().cwiseAbs();
    const double scale = system.diagonal().cwiseAbs().maxCoeff();
    if (ldlt.info() != Eigen::Success || !(scale > 0.0) || diag.minCoeff() <= 1e-12 * scale)
        throw SingularConstraintSystem("multiplier matrix J M^-1 J^T is singular");

    PendulumAcceleration out;
    out.lambda = ldlt.solve(rhs);
    const Eigen::Matrix<double, 6, 1> acc =
        force_over_mass + inv_mass.asDiagonal() * (jac.transpose() * out.lambda);
    for (int j = 0; j < 3; ++j) out.a[j] = acc.segment<2>(2 * j);
    return out;
}

double pendulum_energy(const PendulumParams& p, const CartesianState& s) {
    double e = 0.0;
    for (int i = 0; i < 3; ++i)
        e += 0.5 * p.masses[i] * s.v[i].squaredNorm() + p.masses[i] * p.gravity * s.r[i].y();
    return e;
}

double pendulum_angular_momentum(const PendulumParams& p, const CartesianState& s) {
    double l = 0.0;
    for (int i = 0; i < 3; ++i) l += p.masses[i] * cross(s.r[i], s.v[i]);
    return l;
}

// ---------------------------------------------------------------------------

void SatelliteParams::validate() const {
    if (!(alpha > 0.0)) throw ConfigError("satellite alpha must be positive", 0, "alpha");
    if (!std::isfinite(beta)) throw ConfigError("satellite beta must be finite", 0, "beta");
    if (form == SatelliteForm::Reduced &&
        (std::abs(alpha - 4.0 / 3.0) > 1e-12 || beta != 0.0))
        throw ConfigError("reduced satellite form requires alpha = 4/3 and beta = 0", 0, "form");
}

namespace {

double checked_sin(double theta) {
    const double s = std::sin(theta);
    if (std::abs(s) < kThetaMin)
        throw CoordinateSingularity("satellite state reached sin(theta) = 0");
    return s;
}

} // namespace

double satellite_hamiltonian(const SatelliteParams& p, const SatelliteState& x) {
    const double s = checked_sin(x.theta);
    const double c = std::cos(x.theta);
    const double s2 = s * s;
    if (p.form == SatelliteForm::Reduced) {
        const double sp = std::sin(x.psi);
        return x.p_psi * x.p_psi / (2.0 * s2) + 0.5 * x.p_theta * x.p_theta - x.p_psi +
               0.5 * sp * sp * s2;
    }
    const double k = p.p_phi();
    const double cp = std::cos(x.psi);
    const double sp = std::sin(x.psi);
    return x.p_psi * x.p_psi / (2.0 * s2) + 0.5 * x.p_theta * x.p_theta -
           x.p_psi * (c / s) * cp - k * x.p_psi * c / s2 - x.p_theta * sp + k * cp / s +
           k * k / (2.0 * s2) + 1.5 * (p.alpha - 1.0) * c * c;
}

SatelliteState satellite_rhs(const SatelliteParams& p, const SatelliteState& x) {
    const double s = checked_sin(x.theta);
    const double c = std::cos(x.theta);
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double sp = std::sin(x.psi);
    const double cp = std::cos(x.psi);

    double dh_dpsi, dh_dtheta, dh_dppsi, dh_dptheta;
    if (p.form == SatelliteForm::Reduced) {
        dh_dppsi = x.p_psi / s2 - 1.0;
        dh_dptheta = x.p_theta;
        dh_dpsi = sp * cp * s2;
        dh_dtheta = -x.p_psi * x.p_psi * c / s3 + sp * sp * s * c;
    } else {
        const double k = p.p_phi();
        dh_dppsi = x.p_psi / s2 - (c / s) * cp - k * c / s2;
        dh_dptheta = x.p_theta - sp;
        dh_dpsi = x.p_psi * (c / s) * sp - x.p_theta * cp - k * sp / s;
        dh_dtheta = -x.p_psi * x.p_psi * c / s3 + x.p_psi * cp / s2 +
                    k * x.p_psi * (s2 + 2.0 * c * c) / s3 - k * c * cp / s2 - k * k * c / s3 -
                    3.0 * (p.alpha - 1.0) * s * c;
    }
    return {dh_dppsi, dh_dptheta, -dh_dpsi, -dh_dtheta};
}

} // namespace sectopo
