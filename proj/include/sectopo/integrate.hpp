#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "sectopo/errors.hpp"
#include "sectopo/systems.hpp"

namespace sectopo {

template <std::size_t N>
using StateVec = std::array<double, N>;

struct IntegratorConfig {
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    double max_step = 0.1;
    double projection_tol = 1e-11;
    double baumgarte_gamma = kDefaultBaumgarteGamma;
    double t_end = 0.0;
    /// Upper bound on refined section crossings a collector keeps per plane;
    /// 0 means unlimited. Integration itself never counts crossings.
    std::size_t max_crossings = 0;

    void validate() const;
};

/// Continuous extension of one Dormand-Prince step, in the nested form
///   y(s) = c0 + s (c1 + (1-s) (c2 + s (c3 + (1-s) c4))),  s = (t - t0) / h.
/// At s = 0 and s = 1 it reproduces the step's endpoint states exactly.
template <std::size_t N>
struct DenseSegment {
    double t0 = 0.0;
    double h = 0.0;
    std::array<StateVec<N>, 5> c{};

    double t1() const { return t0 + h; }

    StateVec<N> eval_fraction(double s) const {
        const double s1 = 1.0 - s;
        StateVec<N> y;
        for (std::size_t i = 0; i < N; ++i)
            y[i] = c[0][i] + s * (c[1][i] + s1 * (c[2][i] + s * (c[3][i] + s1 * c[4][i])));
        return y;
    }
    StateVec<N> eval(double t) const { return eval_fraction(h != 0.0 ? (t - t0) / h : 0.0); }
};

template <std::size_t N>
struct TrajectorySample {
    double t = 0.0;
    StateVec<N> state{};
};

/// A conserved quantity with the magnitude its drift is measured against.
struct InvariantValue {
    double value = 0.0;
    double scale = 1.0;
};

template <class S>
concept OdeSystem = requires(const S& sys, typename S::State& y, const typename S::State& cy) {
    { S::dimension } -> std::convertible_to<std::size_t>;
    sys.rhs(cy, y);
    { sys.post_step(y) } -> std::same_as<bool>;
    { sys.invariants(cy) } -> std::same_as<std::vector<InvariantValue>>;
};

namespace dp5 {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
} // namespace dp5

/// Adaptive Dormand-Prince 5(4) stepper with FSAL reuse and dense output.
/// Systems that project onto a manifold do so in post_step; the dense
/// segment is rebuilt around the projected endpoint.
template <OdeSystem Sys>
class Stepper {
public:
    static constexpr std::size_t N = Sys::dimension;
    using State = typename Sys::State;

    struct Result {
        double h_used = 0.0;
        DenseSegment<N> dense;
    };

    Stepper(const Sys& sys, const IntegratorConfig& cfg, double t0, const State& y0)
        : sys_(sys), cfg_(cfg), t_(t0), y_(y0) {
        sys_.rhs(y_, f_);
        h_ = initial_step();
    }

    double t() const { return t_; }
    const State& state() const { return y_; }
    std::size_t rejected() const { return rejected_; }

    /// Advances one accepted step, never past t_limit.
    Result step(double t_limit) {
        using namespace dp5;
        const double span = t_limit - t_;
        if (!(span > 0.0)) throw StepSizeUnderflow("no time left to integrate");
        State k2, k3, k4, k5, k6, k7, tmp, y1;
        for (;;) {
            const double h = std::min({h_, cfg_.max_step, span});
            const bool hits_limit = h >= span;

            for (std::size_t i = 0; i < N; ++i) tmp[i] = y_[i] + h * a21 * f_[i];
            sys_.rhs(tmp, k2);
            for (std::size_t i = 0; i < N; ++i) tmp[i] = y_[i] + h * (a31 * f_[i] + a32 * k2[i]);
            sys_.rhs(tmp, k3);
            for (std::size_t i = 0; i < N; ++i)
                tmp[i] = y_[i] + h * (a41 * f_[i] + a42 * k2[i] + a43 * k3[i]);
            sys_.rhs(tmp, k4);
            for (std::size_t i = 0; i < N; ++i)
                tmp[i] = y_[i] + h * (a51 * f_[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            sys_.rhs(tmp, k5);
            for (std::size_t i = 0; i < N; ++i)
                tmp[i] = y_[i] +
                         h * (a61 * f_[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            sys_.rhs(tmp, k6);
            for (std::size_t i = 0; i < N; ++i)
                y1[i] = y_[i] +
                        h * (a71 * f_[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
            sys_.rhs(y1, k7);

            double err = 0.0;
            bool finite = true;
            for (std::size_t i = 0; i < N; ++i) {
                const double sk =
                    cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y_[i]), std::abs(y1[i]));
                const double e = h * (e1 * f_[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                      e6 * k6[i] + e7 * k7[i]) / sk;
                err += e * e;
                finite = finite && std::isfinite(y1[i]);
            }
            err = std::sqrt(err / static_cast<double>(N));
            if (!finite || !std::isfinite(err)) err = 1e10;

            if (err > 1.0) {
                ++rejected_;
                h_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
                if (h_ < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t_)))
                    throw StepSizeUnderflow("step size underflow at t = " + std::to_string(t_));
                continue;
            }

            if (sys_.post_step(y1)) sys_.rhs(y1, k7);

            Result res;
            res.h_used = h;
            res.dense.t0 = t_;
            res.dense.h = h;
            auto& c = res.dense.c;
            for (std::size_t i = 0; i < N; ++i) {
                c[0][i] = y_[i];
                c[1][i] = y1[i] - y_[i];
                c[2][i] = h * f_[i] - c[1][i];
                c[3][i] = c[1][i] - h * k7[i] - c[2][i];
                c[4][i] = h * (d1 * f_[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                               d7 * k7[i]);
            }

            const double fac = err > 0.0 ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 10.0) : 10.0;
            t_ = hits_limit ? t_limit : t_ + h;
            y_ = y1;
            f_ = k7;
            h_ = std::min(h * fac, cfg_.max_step);
            return res;
        }
    }

private:
    double norm_scaled(const State& v, const State& ref) const {
        double s = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double q = v[i] / (cfg_.abs_tol + cfg_.rel_tol * std::abs(ref[i]));
            s += q * q;
        }
        return std::sqrt(s / static_cast<double>(N));
    }

    double initial_step() const {
        const double d0 = norm_scaled(y_, y_);
        const double d1n = norm_scaled(f_, y_);
        double h0 = (d0 < 1e-10 || d1n < 1e-10) ? 1e-6 : 0.01 * d0 / d1n;
        h0 = std::min(h0, cfg_.max_step);
        State y1, f1, diff;
        for (std::size_t i = 0; i < N; ++i) y1[i] = y_[i] + h0 * f_[i];
        sys_.rhs(y1, f1);
        for (std::size_t i = 0; i < N; ++i) diff[i] = f1[i] - f_[i];
        const double d2 = norm_scaled(diff, y_) / h0;
        const double der = std::max(d1n, d2);
        const double h1 = der <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / der, 0.2);
        return std::min({100.0 * h0, h1, cfg_.max_step});
    }

    const Sys& sys_;
    IntegratorConfig cfg_;
    double t_;
    State y_;
    State f_{};
    double h_ = 0.0;
    std::size_t rejected_ = 0;
};

/// One adaptive step from scratch.
template <OdeSystem Sys>
std::pair<TrajectorySample<Sys::dimension>, typename Stepper<Sys>::Result> step(
    const Sys& sys, double t0, const typename Sys::State& y0, const IntegratorConfig& cfg,
    double t_limit = std::numeric_limits<double>::infinity()) {
    Stepper<Sys> stepper(sys, cfg, t0, y0);
    auto res = stepper.step(t_limit);
    return {{stepper.t(), stepper.state()}, res};
}

template <std::size_t N>
struct TrajectorySummary {
    TrajectorySample<N> final;
    std::size_t steps = 0;
    std::size_t rejected = 0;
    /// max |Q(t) - Q(0)| / max(|Q(0)|, scale(0)) per invariant of the system.
    std::vector<double> max_relative_drift;
    bool stopped_by_observer = false;
};

template <std::size_t N>
using Observer = std::function<bool(const TrajectorySample<N>&, const DenseSegment<N>&)>;

/// Integrates from (t0, y0) up to cfg.t_end. The initial state is passed
/// through post_step first (manifold projection for constrained systems).
/// The observer is called after every accepted step and may return false
/// to stop early.
template <OdeSystem Sys>
TrajectorySummary<Sys::dimension> integrate_trajectory(const Sys& sys, double t0,
                                                       typename Sys::State y0,
                                                       const IntegratorConfig& cfg,
                                                       const Observer<Sys::dimension>& observer = {}) {
    constexpr std::size_t N = Sys::dimension;
    cfg.validate();
    sys.post_step(y0);

    TrajectorySummary<N> summary;
    summary.final = {t0, y0};
    const auto inv0 = sys.invariants(y0);
    summary.max_relative_drift.assign(inv0.size(), 0.0);
    if (!(cfg.t_end > t0)) return summary;

    Stepper<Sys> stepper(sys, cfg, t0, y0);
    while (stepper.t() < cfg.t_end) {
        const auto res = stepper.step(cfg.t_end);
        ++summary.steps;
        const TrajectorySample<N> sample{stepper.t(), stepper.state()};
        const auto inv = sys.invariants(sample.state);
        for (std::size_t k = 0; k < inv.size(); ++k) {
            const double denom = std::max(std::abs(inv0[k].value), inv0[k].scale);
            const double drift = denom > 0.0 ? std::abs(inv[k].value - inv0[k].value) / denom
                                             : std::abs(inv[k].value - inv0[k].value);
            summary.max_relative_drift[k] = std::max(summary.max_relative_drift[k], drift);
        }
        summary.final = sample;
        if (observer && !observer(sample, res.dense)) {
            summary.stopped_by_observer = true;
            break;
        }
    }
    summary.rejected = stepper.rejected();
    return summary;
}

// ---------------------------------------------------------------------------
// Concrete systems.

/// Returns a copy of s with |phi_i| <= tol and |dphi_i/dt| <= tol: positions by
/// mass-weighted Gauss-Newton on phi, velocities by projection onto the
/// tangent space. Throws ProjectionDiverged after max_iter iterations.
CartesianState project_to_manifold(const PendulumParams& p, const CartesianState& s, double tol,
                                   int max_iter = 20);

/// Pendulum chain packed as (r1, r2, r3, v1, v2, v3).
class PendulumOde {
public:
    static constexpr std::size_t dimension = 12;
    using State = StateVec<12>;

    PendulumOde(PendulumParams params, const IntegratorConfig& cfg);

    void rhs(const State& y, State& dydt) const;
    bool post_step(State& y) const;
    /// Energy, then angular momentum when gravity is zero.
    std::vector<InvariantValue> invariants(const State& y) const;

    const PendulumParams& params() const { return params_; }

    static State pack(const CartesianState& s);
    static CartesianState unpack(const State& y, double t = 0.0);

private:
    PendulumParams params_;
    double gamma_;
    double projection_tol_;
};

/// Satellite packed as (psi, theta, p_psi, p_theta).
class SatelliteOde {
public:
    static constexpr std::size_t dimension = 4;
    using State = StateVec<4>;

    explicit SatelliteOde(SatelliteParams params);

    void rhs(const State& y, State& dydt) const;
    bool post_step(State&) const { return false; }
    std::vector<InvariantValue> invariants(const State& y) const;

    const SatelliteParams& params() const { return params_; }

    static State pack(const SatelliteState& s) { return {s.psi, s.theta, s.p_psi, s.p_theta}; }
    static SatelliteState unpack(const State& y) { return {y[0], y[1], y[2], y[3]}; }

private:
    SatelliteParams params_;
};

} // namespace sectopo
