#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "sectopo/errors.hpp"
#include "sectopo/kamscan.hpp"

using namespace sectopo;

namespace {

ScanConfig quick_scan() {
    ScanConfig c;
    c.eps1_min = 0.0;
    c.eps1_max = 0.5;
    c.eps2_min = 0.5;
    c.eps2_max = 1.0;
    c.grid_step = 0.5;
    c.samples_per_cell = 2;
    c.slab_halfwidth = 0.05;
    c.integrator.t_end = 100.0;
    c.integrator.rel_tol = 1e-7;
    c.integrator.abs_tol = 1e-9;
    return c;
}

SampleRecord record(bool failed, VerdictLabel final_label) {
    SampleRecord r;
    r.failed = failed;
    if (!failed) {
        PlaneRecord p;
        p.final_label = final_label;
        r.planes.push_back(p);
    }
    return r;
}

bool same_records(const SampleRecord& a, const SampleRecord& b) {
    if (a.failed != b.failed || a.energy != b.energy || a.planes.size() != b.planes.size()) return false;
    for (std::size_t k = 0; k < a.planes.size(); ++k) {
        const auto& p = a.planes[k];
        const auto& q = b.planes[k];
        if (p.label != q.label || p.final_label != q.final_label || p.verdict.n_points != q.verdict.n_points ||
            p.verdict.max_cluster_diameter != q.verdict.max_cluster_diameter)
            return false;
    }
    return true;
}

} // namespace

TEST_CASE("sample streams are reproducible and distinct") {
    SampleRng a(42, 1, 2, 3), b(42, 1, 2, 3);
    for (int k = 0; k < 100; ++k) CHECK(a.uniform01() == b.uniform01());
    std::set<double> firsts;
    for (std::uint64_t s : {0, 1, 2})
        for (std::uint64_t i : {0, 1})
            for (std::uint64_t j : {0, 1})
                for (std::uint64_t n : {0, 1}) firsts.insert(SampleRng(s, i, j, n).uniform01());
    CHECK(firsts.size() == 24);
    // (i, j) and (j, i) are different streams.
    CHECK(SampleRng(7, 1, 2, 0).uniform01() != SampleRng(7, 2, 1, 0).uniform01());
    SampleRng c(9);
    for (int k = 0; k < 1000; ++k) {
        const double u = c.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("sampled initial states lie on the constraint manifold") {
    PendulumParams p;
    p.eps1 = 0.3;
    p.eps2 = 0.8;
    for (std::uint64_t s = 0; s < 20; ++s) {
        SampleRng rng(1, 0, 0, s);
        const CartesianState x = sample_initial_state(p, rng, 2.0);
        CHECK(constraint_values(p, x).cwiseAbs().maxCoeff() <= 1e-11);
        CHECK(constraint_rates(p, x).cwiseAbs().maxCoeff() <= 1e-11);
    }
}

TEST_CASE("grid nodes cover both ends") {
    ScanConfig c;
    const auto nodes = c.eps1_nodes();
    REQUIRE(nodes.size() == 11);
    CHECK(nodes.front() == 0.0);
    CHECK(nodes.back() == 1.0);
    CHECK(nodes[3] == doctest::Approx(0.3));
    c.eps2_min = c.eps2_max = 0.4;
    CHECK(c.eps2_nodes() == std::vector<double>{0.4});
}

TEST_CASE("scan settings are validated") {
    ScanConfig c;
    CHECK_NOTHROW(c.validate());
    c.samples_per_cell = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.grid_step = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.eps1_max = 1.2;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.chain.gravity = 1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.threads = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("failed samples count in the total but not as empty") {
    std::vector<SampleRecord> rs{record(false, VerdictLabel::Points), record(false, VerdictLabel::Curves),
                                 record(false, VerdictLabel::Inconclusive), record(true, VerdictLabel::Empty)};
    const ScanCell cell = make_cell(0.2, 0.4, rs);
    CHECK(cell.n_samples == 4);
    CHECK(cell.n_failed == 1);
    CHECK(cell.n_empty_or_points == 2);
    CHECK(cell.proportion == 0.5);
    CHECK(make_cell(0, 0, {}).proportion == 0.0);
}

TEST_CASE("unconfirmed Curves do not count") {
    SampleRecord r;
    PlaneRecord p;
    p.verdict.label = VerdictLabel::Curves;
    p.half_slab_label = VerdictLabel::Inconclusive;
    p.final_label = VerdictLabel::Inconclusive;
    r.planes.push_back(p);
    CHECK_FALSE(r.has_curves());
    CHECK(r.counts_as_empty());
}

TEST_CASE("section run needs the free chain") {
    PendulumParams p;
    p.gravity = 1.0;
    SampleRng rng(3);
    const CartesianState s = sample_initial_state(p, rng, 1.0);
    CHECK_THROWS_AS(section_pendulum(p, s, {}), ReductionInvalid);
}

TEST_CASE("one-cell scan equals run_cell") {
    ScanConfig c = quick_scan();
    c.eps1_min = c.eps1_max = 0.5;
    c.eps2_min = c.eps2_max = 0.5;
    const ScanResult r = scan(c);
    REQUIRE(r.cells.size() == 1);
    const ScanCell direct = run_cell(0.5, 0.5, c);
    CHECK(r.cells[0].proportion == direct.proportion);
    REQUIRE(r.cells[0].samples.size() == direct.samples.size());
    for (std::size_t k = 0; k < direct.samples.size(); ++k) CHECK(same_records(r.cells[0].samples[k], direct.samples[k]));
    REQUIRE(r.marginal_eps1.size() == 1);
    CHECK(r.marginal_eps1[0] == direct.proportion);
}

TEST_CASE("scan results do not depend on the thread count") {
    ScanConfig c = quick_scan();
    const ScanResult one = scan(c);
    c.threads = 3;
    std::size_t last_done = 0, calls = 0;
    const ScanResult three = scan(c, [&](std::size_t done, std::size_t total) {
        CHECK(total == 8);
        CHECK(done > last_done);
        last_done = done;
        ++calls;
    });
    CHECK(calls == 8);
    REQUIRE(one.cells.size() == 4);
    REQUIRE(three.cells.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(one.cells[k].eps1 == three.cells[k].eps1);
        CHECK(one.cells[k].eps2 == three.cells[k].eps2);
        CHECK(one.cells[k].proportion == three.cells[k].proportion);
        for (std::size_t s = 0; s < one.cells[k].samples.size(); ++s)
            CHECK(same_records(one.cells[k].samples[s], three.cells[k].samples[s]));
    }
    CHECK(one.marginal_eps1 == three.marginal_eps1);
    // cells are eps1-major
    CHECK(one.cell(1, 0).eps1 == 0.5);
    CHECK(one.cell(1, 0).eps2 == 0.5);
    CHECK(one.cell(0, 1).eps2 == 1.0);
}

TEST_CASE("section run records every default plane") {
    PendulumParams p;
    SampleRng rng(5);
    const CartesianState s = sample_initial_state(p, rng, 1.0);
    SectionOptions opt;
    opt.slab_halfwidth = 0.05;
    opt.integrator.t_end = 50.0;
    const SectionRun run = section_pendulum(p, s, opt);
    REQUIRE(run.planes.size() == 6);
    REQUIRE(run.clouds.size() == 6);
    for (std::size_t k = 0; k < 6; ++k) {
        CHECK(run.planes[k].label == run.clouds[k].plane.label);
        CHECK(run.planes[k].verdict.n_points == run.clouds[k].size());
    }
    REQUIRE(run.max_relative_drift.size() == 2);
    CHECK(run.max_relative_drift[0] < 1e-8);
    CHECK(run.steps > 0);
}
