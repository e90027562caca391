#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "sectopo/classify.hpp"
#include "sectopo/sections.hpp"
#include "support/synthetic.hpp"

using namespace sectopo;

namespace {

constexpr double pi = std::numbers::pi;
constexpr std::array<bool, 4> kFlat{false, false, false, false};

Phase lerp(const Phase& a, const Phase& b, double s) {
    Phase x;
    for (int i = 0; i < 4; ++i) x[i] = a[i] + s * (b[i] - a[i]);
    return x;
}

template <std::size_t K, class Map>
std::vector<SectionCloud> flow_sections(const std::array<double, K>& omega, Map map, double t_end, double eps) {
    testing::LinearFlow<K> flow{omega};
    StateVec<K> y0{};
    for (std::size_t i = 0; i < K; ++i) y0[i] = 0.7 * static_cast<double>(i + 1);
    IntegratorConfig cfg;
    cfg.t_end = t_end;
    cfg.max_step = 0.5;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-12;
    SectionCollector<K> col(default_planes(map(y0), PhaseLayout::pendulum(), eps),
                            [&](const StateVec<K>& y) { return map(y); }, y0, 0.0);
    integrate_trajectory(flow, 0.0, y0, cfg, col.observer());
    return col.take_clouds();
}

} // namespace

TEST_CASE("crossing of a linear path is exact") {
    const Phase a{0, 0, 0, 0}, b{1, 2, 0, 0};
    LinearFunctional f;
    f.coeffs = {1, 0, 0, 0};
    f.offset = 0.3;
    const auto c = detect_crossing([&](double s) { return lerp(a, b, s); }, 2.0, 0.5, a, b, f, kFlat, 1e-13);
    REQUIRE(c);
    CHECK(c->t == doctest::Approx(2.15));
    CHECK(c->point[0] == doctest::Approx(0.3));
    CHECK(c->point[1] == doctest::Approx(0.6));
}

TEST_CASE("crossing of a cubic path") {
    const auto path = [](double s) { return Phase{s * s * s, s, 0, 0}; };
    LinearFunctional f;
    f.coeffs = {1, 0, 0, 0};
    f.offset = 0.125;
    const auto c = detect_crossing(path, 0.0, 1.0, path(0), path(1), f, kFlat, 1e-14);
    REQUIRE(c);
    CHECK(c->t == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(std::abs(f(c->point)) <= 1e-14);
}

TEST_CASE("no sign change, no crossing") {
    const Phase a{0.1, 0, 0, 0}, b{0.9, 0, 0, 0};
    LinearFunctional f;
    f.coeffs = {1, 0, 0, 0};
    f.offset = 1.0;
    CHECK_FALSE(detect_crossing([&](double s) { return lerp(a, b, s); }, 0, 1, a, b, f, kFlat, 1e-12));
}

TEST_CASE("the angle seam is not a crossing") {
    // beta1 runs from 3.1 through pi to 3.2 - 2 pi.
    const Phase a{3.1, 0, 0, 0}, b{3.2 - 2 * pi, 0, 0, 0};
    const auto path = [&](double s) { return Phase{wrap_angle(3.1 + 0.1 * s), 0, 0, 0}; };
    const std::array<bool, 4> ang{true, false, false, false};
    LinearFunctional zero;
    zero.coeffs = {1, 0, 0, 0};
    CHECK_FALSE(detect_crossing(path, 0, 1, a, b, zero, ang, 1e-12));
    LinearFunctional at_pi = zero;
    at_pi.offset = pi;
    const auto c = detect_crossing(path, 0, 1, a, b, at_pi, ang, 1e-12);
    REQUIRE(c);
    CHECK(c->t == doctest::Approx((pi - 3.1) / 0.1).epsilon(1e-9));
}

TEST_CASE("default planes through the origin") {
    const auto planes = default_planes({0, 0, 0, 0}, PhaseLayout::pendulum());
    REQUIRE(planes.size() == 6);
    CHECK(planes[0].label == "(beta1 = 0, beta2 = 0)");
    CHECK(planes[0].axis_labels[0] == "beta1_dot");
    CHECK(planes[0].axis_labels[1] == "beta2_dot");
    std::set<std::string> labels;
    for (const auto& p : planes) {
        CHECK_NOTHROW(p.validate());
        labels.insert(p.label);
    }
    CHECK(labels.size() == 6);
    const auto shifted = default_planes({0, 0, 1, 1}, PhaseLayout::pendulum());
    CHECK(shifted.back().label == "(beta1_dot = 1, beta2_dot = 1)");
    CHECK(shifted.back().slab.offset == 1.0);
}

TEST_CASE("rank-deficient plane is rejected") {
    PlaneSpec p = testing::flat_plane(1e-3);
    p.slab.coeffs = {0, 0, 2, 0};
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = testing::flat_plane(0.0);
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("plane coordinates are an isometry of the plane") {
    PlaneSpec p;
    p.event.coeffs = {1, 1, 0, 0};
    p.event.offset = 0.5;
    p.slab.coeffs = {0, 1, -1, 2};
    p.slab.offset = -0.2;
    p.slab_halfwidth = 1e-3;
    p.angular = kFlat;
    const auto basis = p.basis();
    double dot = 0.0, n0 = 0.0, n1 = 0.0;
    for (int i = 0; i < 4; ++i) {
        dot += basis[0][i] * basis[1][i];
        n0 += basis[0][i] * basis[0][i];
        n1 += basis[1][i] * basis[1][i];
    }
    for (const Phase& e : basis) {
        double ev = 0.0, sl = 0.0;
        for (int i = 0; i < 4; ++i) {
            ev += p.event.coeffs[i] * e[i];
            sl += p.slab.coeffs[i] * e[i];
        }
        CHECK(std::abs(ev) < 1e-12);
        CHECK(std::abs(sl) < 1e-12);
    }
    CHECK(std::abs(dot) < 1e-12);
    CHECK(n0 == doctest::Approx(1.0));
    CHECK(n1 == doctest::Approx(1.0));
    // Points of the plane: anchor plus combinations of the basis.
    const Phase o = p.anchor();
    CHECK(std::abs(p.event(o)) < 1e-12);
    CHECK(std::abs(p.slab(o)) < 1e-12);
    std::mt19937_64 rng(5);
    for (int k = 0; k < 50; ++k) {
        Phase x = o, y = o;
        const double a = testing::uniform(rng, -2, 2), b = testing::uniform(rng, -2, 2);
        const double c = testing::uniform(rng, -2, 2), d = testing::uniform(rng, -2, 2);
        for (int i = 0; i < 4; ++i) {
            x[i] += a * basis[0][i] + b * basis[1][i];
            y[i] += c * basis[0][i] + d * basis[1][i];
        }
        const auto u = plane_coords(x, p), v = plane_coords(y, p);
        CHECK(std::hypot(u[0] - v[0], u[1] - v[1]) == doctest::Approx(std::hypot(a - c, b - d)));
    }
}

TEST_CASE("section points outside the plane bounds are refused") {
    SectionCloud c;
    c.plane = testing::flat_plane(1e-2);
    CHECK_NOTHROW(c.add(0.0, {0.1, 0.2, 0.0, 0.005}));
    CHECK_THROWS_AS(c.add(1.0, {0.1, 0.2, 1e-6, 0.0}), std::logic_error);
    CHECK_THROWS_AS(c.add(1.0, {0.1, 0.2, 0.0, 0.02}), std::logic_error);
    CHECK(c.size() == 1);
    const SectionCloud narrow = restrict_slab(c, 1e-3);
    CHECK(narrow.size() == 0);
    CHECK(narrow.plane.slab_halfwidth == 1e-3);
}

TEST_CASE("a longer trajectory never loses section points") {
    const std::array<double, 3> om{1.0, std::sqrt(2.0), std::sqrt(5.0) - 1.0};
    const auto a = flow_sections(om, testing::three_torus_point, 5e3, 1e-2);
    const auto b = flow_sections(om, testing::three_torus_point, 1e4, 1e-2);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(b[k].size() >= a[k].size());
        for (std::size_t i = 0; i < a[k].size(); ++i) CHECK(b[k].times[i] == a[k].times[i]);
        for (std::size_t i = 0; i < a[k].size(); ++i)
            CHECK(std::abs(a[k].plane.event(a[k].points[i])) <= 1e-12 * a[k].plane.event.tolerance_scale());
    }
}

TEST_CASE("flow on a 2-torus cuts a plane in points") {
    const auto clouds = flow_sections<2>({1.0, std::sqrt(2.0)}, testing::torus_point, 3e5, 1e-3);
    int stable_points = 0;
    for (const auto& c : clouds) {
        const Verdict v = classify(c);
        CHECK(v.label != VerdictLabel::Curves);
        if (v.label == VerdictLabel::Points && classify(restrict_slab(c, 5e-4)).label == VerdictLabel::Points)
            ++stable_points;
    }
    CHECK(stable_points >= 1);
}

TEST_CASE("flow dense on a 3-torus cuts a plane in curves") {
    const std::array<double, 3> om{1.0, std::sqrt(2.0), std::sqrt(5.0) - 1.0};
    const auto clouds = flow_sections(om, testing::three_torus_point, 2e5, 1e-2);
    int stable_curves = 0;
    for (const auto& c : clouds)
        if (classify(c).label == VerdictLabel::Curves && classify_half_slab(c).label == VerdictLabel::Curves)
            ++stable_curves;
    CHECK(stable_curves >= 1);
}
