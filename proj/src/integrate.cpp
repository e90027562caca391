#include "sectopo/integrate.hpp"

#include <cmath>

namespace sectopo {

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0.0)) throw ConfigError("rel_tol must be positive", 0, "rel_tol");
    if (!(abs_tol > 0.0)) throw ConfigError("abs_tol must be positive", 0, "abs_tol");
    if (!(max_step > 0.0)) throw ConfigError("max_step must be positive", 0, "max_step");
    if (!(projection_tol > 0.0))
        throw ConfigError("projection_tol must be positive", 0, "projection_tol");
    if (!(baumgarte_gamma >= 0.0))
        throw ConfigError("baumgarte_gamma must be non-negative", 0, "baumgarte_gamma");
    if (!std::isfinite(t_end)) throw ConfigError("t_end must be finite", 0, "t_end");
}

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;

Vec6 inverse_masses(const PendulumParams& p) {
    Vec6 m;
    for (int j = 0; j < 3; ++j) m.segment<2>(2 * j).setConstant(1.0 / p.masses[j]);
    return m;
}

// Minimum-kinetic-metric correction: dx = M^-1 J^T (J M^-1 J^T)^-1 residual.
Vec6 weighted_correction(const ConstraintJacobian& jac, const Vec6& inv_mass,
                         const Eigen::Vector3d& residual) {
    const Eigen::Matrix3d a = jac * inv_mass.asDiagonal() * jac.transpose();
    Eigen::LDLT<Eigen::Matrix3d> ldlt(a);
    const double scale = a.diagonal().cwiseAbs().maxCoeff();
    if (ldlt.info() != Eigen::Success || !(scale > 0.0) ||
        ldlt.vectorD().cwiseAbs().minCoeff() <= 1e-12 * scale)
        throw ProjectionDiverged("constraint Jacobian lost rank during projection");
    return inv_mass.asDiagonal() * (jac.transpose() * ldlt.solve(residual));
}

} // namespace

CartesianState project_to_manifold(const PendulumParams& p, const CartesianState& s, double tol,
                                   int max_iter) {
    CartesianState out = s;
    const Vec6 inv_mass = inverse_masses(p);

    Eigen::Vector3d phi = constraint_values(p, out);
    for (int iter = 0; iter < max_iter && phi.cwiseAbs().maxCoeff() > 0.01 * tol; ++iter) {
        const Vec6 dq = weighted_correction(constraint_jacobian(p, out), inv_mass, phi);
        for (int j = 0; j < 3; ++j) out.r[j] -= dq.segment<2>(2 * j);
        phi = constraint_values(p, out);
        if (!phi.allFinite()) break;
        if (dq.cwiseAbs().maxCoeff() < 1e-15) break;
    }
    if (!(phi.cwiseAbs().maxCoeff() <= tol))
        throw ProjectionDiverged("position projection did not converge");

    for (int iter = 0; iter < 2; ++iter) {
        const ConstraintJacobian jac = constraint_jacobian(p, out);
        const Eigen::Vector3d rate = constraint_rates(p, out);
        if (rate.cwiseAbs().maxCoeff() <= 0.01 * tol) break;
        const Vec6 dv = weighted_correction(jac, inv_mass, rate);
        for (int j = 0; j < 3; ++j) out.v[j] -= dv.segment<2>(2 * j);
    }
    if (!(constraint_rates(p, out).cwiseAbs().maxCoeff() <= tol))
        throw ProjectionDiverged("velocity projection did not converge");
    return out;
}

PendulumOde::PendulumOde(PendulumParams params, const IntegratorConfig& cfg)
    : params_(params), gamma_(cfg.baumgarte_gamma), projection_tol_(cfg.projection_tol) {
    params_.validate();
}

PendulumOde::State PendulumOde::pack(const CartesianState& s) {
    State y;
    for (int j = 0; j < 3; ++j) {
        y[2 * j] = s.r[j].x();
        y[2 * j + 1] = s.r[j].y();
        y[6 + 2 * j] = s.v[j].x();
        y[6 + 2 * j + 1] = s.v[j].y();
    }
    return y;
}

CartesianState PendulumOde::unpack(const State& y, double t) {
    CartesianState s;
    s.t = t;
    for (int j = 0; j < 3; ++j) {
        s.r[j] = Vec2(y[2 * j], y[2 * j + 1]);
        s.v[j] = Vec2(y[6 + 2 * j], y[6 + 2 * j + 1]);
    }
    return s;
}

void PendulumOde::rhs(const State& y, State& dydt) const {
    const CartesianState s = unpack(y);
    const PendulumAcceleration acc = pendulum_rhs(params_, s, gamma_);
    for (int j = 0; j < 6; ++j) dydt[j] = y[6 + j];
    for (int j = 0; j < 3; ++j) {
        dydt[6 + 2 * j] = acc.a[j].x();
        dydt[6 + 2 * j + 1] = acc.a[j].y();
    }
}

bool PendulumOde::post_step(State& y) const {
    const State projected = pack(project_to_manifold(params_, unpack(y), projection_tol_));
    const bool changed = projected != y;
    y = projected;
    return changed;
}

std::vector<InvariantValue> PendulumOde::invariants(const State& y) const {
    const CartesianState s = unpack(y);
    double kinetic_scale = 0.0;
    double momentum_scale = 0.0;
    for (int j = 0; j < 3; ++j) {
        kinetic_scale += 0.5 * params_.masses[j] * s.v[j].squaredNorm() +
                         params_.masses[j] * std::abs(params_.gravity * s.r[j].y());
        momentum_scale += params_.masses[j] * s.r[j].norm() * s.v[j].norm();
    }
    std::vector<InvariantValue> out{{pendulum_energy(params_, s), kinetic_scale}};
    if (params_.gravity == 0.0) out.push_back({pendulum_angular_momentum(params_, s), momentum_scale});
    return out;
}

SatelliteOde::SatelliteOde(SatelliteParams params) : params_(params) { params_.validate(); }

void SatelliteOde::rhs(const State& y, State& dydt) const {
    dydt = pack(satellite_rhs(params_, unpack(y)));
}

std::vector<InvariantValue> SatelliteOde::invariants(const State& y) const {
    const double h = satellite_hamiltonian(params_, unpack(y));
    return {{h, std::abs(h)}};
}

} // namespace sectopo
