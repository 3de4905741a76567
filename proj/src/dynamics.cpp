#include "twinbeam/dynamics.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "twinbeam/gaussian.hpp"

namespace twinbeam::dynamics {

void RunConfig::validate() const {
    model.validate();
    params.validate();
    grid.validate(params.omega0);
    if (!(r >= 0.0) || !std::isfinite(r)) {
        throw std::invalid_argument("RunConfig: r must be >= 0");
    }
    if (!(eps_death > 0.0)) {
        throw std::invalid_argument("RunConfig: eps_death must be > 0");
    }
}

Trajectory run(const RunConfig& config) {
    config.validate();
    const auto kernels = propagator::kernels_on_grid(
        config.model, config.params, config.grid, propagator::PropagationMode::Exact,
        config.source, config.quad);
    const CovarianceMatrix4 sigma0 = propagator::initial_twb(config.r);

    Trajectory traj;
    const std::size_t n = kernels.size();
    traj.times.reserve(n);
    traj.ef_exact.reserve(n);
    traj.ef_secular.reserve(n);
    traj.nu_min_exact.reserve(n);
    traj.nu_min_secular.reserve(n);
    traj.kernels = kernels;

    for (const auto& k : kernels) {
        // exact/secular agreement bound: the mode difference of every A-block
        // entry is bounded by the summed oscillating-kernel magnitudes
        const double budget = 2.0 * (std::fabs(k.DeltaCo) + std::fabs(k.DeltaSi) +
                                     std::fabs(k.PiCo) + std::fabs(k.PiSi));
        const CovarianceMatrix4 se = propagator::evolve_covariance(
            sigma0, k, config.params.omega0, propagator::PropagationMode::Exact);
        const CovarianceMatrix4 ss = propagator::evolve_covariance(
            sigma0, k, config.params.omega0, propagator::PropagationMode::Secular);
        if ((se.m - ss.m).cwiseAbs().maxCoeff() > budget + 1e-14) {
            throw std::logic_error("run: exact/secular bound violated");
        }

        const auto ee = gaussian::eof_symmetric(se);
        const auto es = gaussian::eof_symmetric(ss);
        const double ne = gaussian::min_symplectic_eigenvalue(se);
        const double ns = gaussian::min_symplectic_eigenvalue(ss);
        traj.times.push_back(k.t);
        traj.ef_exact.push_back(ee.value);
        traj.ef_secular.push_back(es.value);
        traj.nu_min_exact.push_back(ne);
        traj.nu_min_secular.push_back(ns);
        if (ne < 0.5 - 1e-6) {
            traj.physicality_warnings.push_back(k.t);
        }
    }
    return traj;
}

EventReport detect_events_curve(const std::vector<double>& times,
                                const std::vector<double>& ef, double eps_death) {
    if (times.empty() || times.size() != ef.size()) {
        throw std::invalid_argument("detect_events_curve: empty or mismatched series");
    }
    EventReport report;
    report.horizon = times.back();
    const bool born_alive = ef.front() >= eps_death;
    bool alive = born_alive;
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double t0 = times[i - 1], t1 = times[i];
        const double e0 = ef[i - 1], e1 = ef[i];
        if (alive && e1 < eps_death) {
            const double f = (e0 - eps_death) / (e0 - e1);
            report.death_times.push_back(t0 + f * (t1 - t0));
            alive = false;
        } else if (!alive && e1 >= eps_death) {
            const double f = (e1 != e0) ? (eps_death - e0) / (e1 - e0) : 1.0;
            report.revival_times.push_back(t0 + f * (t1 - t0));
            alive = true;
        }
    }
    if (!born_alive) {
        report.classification = Classification::BornDeadOrSeparable;
    } else if (report.death_times.empty()) {
        report.classification = Classification::AlwaysAlive;
    } else if (!report.revival_times.empty()) {
        report.classification = Classification::ESDWithRevival;
    } else {
        report.classification = Classification::ESD;
    }
    return report;
}

std::pair<EventReport, EventReport> detect_events(const Trajectory& traj,
                                                  double eps_death) {
    return {detect_events_curve(traj.times, traj.ef_exact, eps_death),
            detect_events_curve(traj.times, traj.ef_secular, eps_death)};
}

DivergenceMetrics compare(const Trajectory& traj, double eps_death) {
    if (traj.times.empty()) {
        throw std::invalid_argument("compare: empty trajectory");
    }
    DivergenceMetrics out;
    out.t_at_max = traj.times.front();
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double d = std::fabs(traj.ef_exact[i] - traj.ef_secular[i]);
        if (d > out.max_abs_diff) {
            out.max_abs_diff = d;
            out.t_at_max = traj.times[i];
        }
    }
    const auto [re, rs] = detect_events(traj, eps_death);
    if (!re.death_times.empty()) out.death_time_exact = re.death_times.front();
    if (!rs.death_times.empty()) out.death_time_secular = rs.death_times.front();
    return out;
}

std::string to_string(Classification c) {
    switch (c) {
        case Classification::AlwaysAlive: return "AlwaysAlive";
        case Classification::ESD: return "ESD";
        case Classification::ESDWithRevival: return "ESDWithRevival";
        case Classification::BornDeadOrSeparable: return "BornDeadOrSeparable";
    }
    return "unknown";
}

}  // namespace twinbeam::dynamics
