// Trajectory orchestration: exact and secular entanglement curves on a grid,
// death/revival detection, and exact-vs-secular divergence metrics.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "twinbeam/propagator.hpp"
#include "twinbeam/reservoir.hpp"

namespace twinbeam::dynamics {

struct RunConfig {
    reservoir::SpectralModel model;
    reservoir::CouplingParams params;
    double r = 0.0;  // initial squeezing
    propagator::TimeGrid grid;
    double eps_death = 1e-9;  // nats
    propagator::CoefficientSource source = propagator::CoefficientSource::Analytic;
    reservoir::QuadratureConfig quad;

    void validate() const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> ef_exact;
    std::vector<double> ef_secular;
    std::vector<double> nu_min_exact;
    std::vector<double> nu_min_secular;
    std::vector<propagator::MemoryKernels> kernels;
    // Times where the exact-mode state dipped below the vacuum floor
    // (nu_min < 1/2 - 1e-6); never silently dropped.
    std::vector<double> physicality_warnings;
};

enum class Classification { AlwaysAlive, ESD, ESDWithRevival, BornDeadOrSeparable };

std::string to_string(Classification c);

struct EventReport {
    std::vector<double> death_times;
    std::vector<double> revival_times;
    Classification classification = Classification::BornDeadOrSeparable;
    double horizon = 0.0;
};

struct DivergenceMetrics {
    double max_abs_diff = 0.0;
    double t_at_max = 0.0;
    // -1 when the curve never dies (NaN-free sentinel)
    double death_time_exact = -1.0;
    double death_time_secular = -1.0;
};

// Composes reservoir -> propagator -> gaussian over the grid in both modes.
// Deterministic for a given config.
Trajectory run(const RunConfig& config);

// Crossing scan of one curve against eps_death; crossing times refined by
// linear interpolation between samples.
EventReport detect_events_curve(const std::vector<double>& times,
                                const std::vector<double>& ef, double eps_death);

// Reports for the exact and secular curves of a trajectory.
std::pair<EventReport, EventReport> detect_events(const Trajectory& traj,
                                                  double eps_death);

DivergenceMetrics compare(const Trajectory& traj, double eps_death = 1e-9);

}  // namespace twinbeam::dynamics
