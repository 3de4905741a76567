#include <doctest.h>

#include <cmath>
#include <vector>

#include "twinbeam/cli.hpp"
#include "twinbeam/dynamics.hpp"

using namespace twinbeam;
using namespace twinbeam::dynamics;
using propagator::CoefficientSource;
using reservoir::CouplingParams;
using reservoir::SpectralModel;

namespace {

RunConfig small_config(double r = 1.0) {
    RunConfig cfg;
    cfg.model = SpectralModel::zero_t(0.1);
    cfg.params = CouplingParams{0.1, 5.0};
    cfg.r = r;
    cfg.grid = propagator::TimeGrid{6.0, 512};
    return cfg;
}

RunConfig high_t_config(double omega0, double r, double t_max, int n) {
    RunConfig cfg;
    cfg.model = SpectralModel::high_t(0.1, 200.0);
    cfg.params = CouplingParams{0.1, omega0};
    cfg.r = r;
    cfg.grid = propagator::TimeGrid{t_max, n};
    return cfg;
}

}  // namespace

TEST_CASE("run: separable initial state stays separable") {
    const auto traj = run(small_config(0.0));
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        CHECK(traj.ef_exact[i] == 0.0);
        CHECK(traj.ef_secular[i] == 0.0);
    }
    const auto [re, rs] = detect_events(traj, 1e-9);
    CHECK(re.classification == Classification::BornDeadOrSeparable);
    CHECK(re.death_times.empty());
    CHECK(rs.classification == Classification::BornDeadOrSeparable);
}

TEST_CASE("run: initial value equals the closed-form TWB entanglement") {
    for (double r : {0.3, 1.0, 2.0}) {
        const auto traj = run(small_config(r));
        const double c2 = std::cosh(r) * std::cosh(r);
        const double s2 = std::sinh(r) * std::sinh(r);
        const double want = c2 * std::log(c2) - s2 * std::log(s2);
        CHECK(std::fabs(traj.ef_exact.front() - want) < 1e-9);
        CHECK(std::fabs(traj.ef_secular.front() - want) < 1e-9);
    }
}

TEST_CASE("run: deterministic, bitwise") {
    const auto a = run(small_config(1.2));
    const auto b = run(small_config(1.2));
    REQUIRE(a.times.size() == b.times.size());
    for (std::size_t i = 0; i < a.times.size(); ++i) {
        CHECK(a.ef_exact[i] == b.ef_exact[i]);
        CHECK(a.ef_secular[i] == b.ef_secular[i]);
        CHECK(a.nu_min_exact[i] == b.nu_min_exact[i]);
    }
}

TEST_CASE("run: physicality of the secular branch on a fast-death config") {
    const auto traj = run(high_t_config(0.15, 1.0, 20.0, 2048));
    for (double nu : traj.nu_min_secular) {
        CHECK(nu >= 0.5 - 1e-6);
    }
}

TEST_CASE("detect_events: synthetic max(0, cos t) crossings") {
    const double eps = 1e-9;
    const int n = 3000;
    std::vector<double> ts(n + 1), ef(n + 1);
    const double t_max = 3.0 * 3.14159265358979;
    for (int i = 0; i <= n; ++i) {
        ts[i] = t_max * i / n;
        ef[i] = std::max(0.0, std::cos(ts[i]));
    }
    const auto rep = detect_events_curve(ts, ef, eps);
    REQUIRE(rep.death_times.size() == 2);
    REQUIRE(rep.revival_times.size() == 1);
    const double dt = t_max / n;
    CHECK(std::fabs(rep.death_times[0] - 3.14159265 / 2.0) <= dt);
    CHECK(std::fabs(rep.revival_times[0] - 3.0 * 3.14159265 / 2.0) <= dt);
    CHECK(std::fabs(rep.death_times[1] - 5.0 * 3.14159265 / 2.0) <= dt);
    CHECK(rep.classification == Classification::ESDWithRevival);
    CHECK(rep.horizon == ts.back());
}

TEST_CASE("detect_events: all-zero trajectory") {
    std::vector<double> ts{0.0, 1.0, 2.0}, ef{0.0, 0.0, 0.0};
    const auto rep = detect_events_curve(ts, ef, 1e-9);
    CHECK(rep.classification == Classification::BornDeadOrSeparable);
    CHECK(rep.death_times.empty());
    CHECK(rep.revival_times.empty());
}

TEST_CASE("detect_events: no death means AlwaysAlive") {
    std::vector<double> ts{0.0, 1.0, 2.0}, ef{1.0, 0.8, 0.9};
    CHECK(detect_events_curve(ts, ef, 1e-9).classification ==
          Classification::AlwaysAlive);
}

TEST_CASE("compare: identical curves give zero divergence") {
    Trajectory traj;
    for (int i = 0; i <= 10; ++i) {
        traj.times.push_back(0.1 * i);
        traj.ef_exact.push_back(1.0 / (1 + i));
        traj.ef_secular.push_back(1.0 / (1 + i));
    }
    const auto m = compare(traj);
    CHECK(m.max_abs_diff == 0.0);
    CHECK(m.death_time_exact == -1.0);
    CHECK(m.death_time_secular == -1.0);
}

TEST_CASE("compare: locates the maximum difference and first deaths") {
    Trajectory traj;
    for (int i = 0; i <= 100; ++i) {
        const double t = i * 0.1;
        traj.times.push_back(t);
        traj.ef_exact.push_back(std::max(0.0, 1.0 - 0.25 * t));
        traj.ef_secular.push_back(std::max(0.0, 1.0 - 0.125 * t));
    }
    const auto m = compare(traj);
    // curves diverge most at the moment the exact one dies (t = 4)
    CHECK(m.t_at_max == doctest::Approx(4.0).epsilon(0.03));
    CHECK(m.max_abs_diff == doctest::Approx(0.5).epsilon(0.03));
    CHECK(m.death_time_exact == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(m.death_time_secular == doctest::Approx(8.0).epsilon(1e-6));
}

TEST_CASE("high-T fast-oscillation config shows deaths and revivals") {
    // thermal noise kills and briefly revives the entanglement; the exact
    // and secular curves then disagree strongly
    const auto traj = run(high_t_config(10.0, 2.0, 8.0, 4096));
    const auto [re, rs] = detect_events(traj, 1e-9);
    CHECK(re.classification == Classification::ESDWithRevival);
    CHECK(rs.classification == Classification::ESDWithRevival);
    CHECK_FALSE(re.death_times.empty());
    CHECK_FALSE(rs.death_times.empty());
    // secular first death comes much earlier at high initial squeezing
    CHECK(rs.death_times.front() < re.death_times.front());
}

TEST_CASE("threshold robustness: classification stable under eps x10") {
    const auto traj = run(high_t_config(10.0, 2.0, 8.0, 4096));
    const auto [r1, s1] = detect_events(traj, 1e-10);
    const auto [r2, s2] = detect_events(traj, 1e-9);
    const auto [r3, s3] = detect_events(traj, 1e-8);
    CHECK(r1.classification == r2.classification);
    CHECK(r2.classification == r3.classification);
    CHECK(s1.classification == s3.classification);
}

TEST_CASE("threshold robustness on the reference presets") {
    for (const char* name : {"fig1a", "fig2a", "fig2b", "fig3a"}) {
        const auto* preset = cli::find_preset(name);
        REQUIRE(preset != nullptr);
        const auto traj = run(preset->config.run);
        const auto [lo_e, lo_s] = detect_events(traj, 1e-10);
        const auto [mid_e, mid_s] = detect_events(traj, 1e-9);
        const auto [hi_e, hi_s] = detect_events(traj, 1e-8);
        CHECK_MESSAGE(lo_e.classification == mid_e.classification, name);
        CHECK_MESSAGE(mid_e.classification == hi_e.classification, name);
        CHECK_MESSAGE(lo_s.classification == hi_s.classification, name);
    }
}

TEST_CASE("quadrature source matches analytic source on a short run") {
    RunConfig cfg = small_config(1.0);
    cfg.grid = propagator::TimeGrid{1.5, 64};
    const auto ta = run(cfg);
    cfg.source = CoefficientSource::Quadrature;
    const auto tq = run(cfg);
    for (std::size_t i = 0; i < ta.times.size(); i += 8) {
        CHECK(std::fabs(ta.ef_exact[i] - tq.ef_exact[i]) < 1e-6);
    }
}

TEST_CASE("config validation failures") {
    RunConfig cfg = small_config();
    cfg.r = -1.0;
    CHECK_THROWS_AS(run(cfg), std::invalid_argument);
    cfg = small_config();
    cfg.eps_death = 0.0;
    CHECK_THROWS_AS(run(cfg), std::invalid_argument);
    cfg = small_config();
    cfg.grid.n_steps = 10;  // violates the oscillation-resolution bound
    CHECK_THROWS_AS(run(cfg), std::invalid_argument);
}
