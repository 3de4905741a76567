// Cumulative memory kernels and the evolved mean/covariance of the
// weak-coupling solution, in exact (nonsecular) and secular modes.

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "twinbeam/reservoir.hpp"
#include "twinbeam/state.hpp"

namespace twinbeam::propagator {

// Exponentially weighted cumulative integrals of the coefficients; every
// field vanishes at t = 0. Gamma may transiently decrease where gamma(t) < 0.
struct MemoryKernels {
    double t = 0.0;
    double Gamma = 0.0;      // 2 int_0^t gamma
    double DeltaGamma = 0.0; // e^{-Gamma} int e^{Gamma} Delta
    double DeltaCo = 0.0;    // e^{-Gamma} int e^{Gamma} Delta cos 2w0(t-s)
    double DeltaSi = 0.0;    // ... sin 2w0(t-s)
    double PiCo = 0.0;
    double PiSi = 0.0;
};

enum class PropagationMode { Exact, Secular };

enum class CoefficientSource { Analytic, Quadrature };

struct TimeGrid {
    double t_max = 0.0;
    int n_steps = 0;

    double dt() const { return t_max / n_steps; }
    // n_steps >= 2 and 2*omega0*dt <= pi/4 (resolves the fastest phase).
    void validate(double omega0) const;
};

// Kernels at every grid node t_i = i*dt, i = 0..n_steps. The e^{Gamma}
// weighted integrals are accumulated with locally rescaled composite Simpson
// (no overflow for large Gamma); the 2w0(t-s) phases are recombined per node
// from fixed-phase prefix integrals. Secular mode leaves the four oscillating
// kernels at zero.
std::vector<MemoryKernels> kernels_on_grid(
    const reservoir::SpectralModel& model, const reservoir::CouplingParams& params,
    const TimeGrid& grid, PropagationMode mode,
    CoefficientSource source = CoefficientSource::Analytic,
    const reservoir::QuadratureConfig& quad_cfg = {});

// Symmetric twin-beam covariance, vacuum-is-1/2 convention:
// A = B = (cosh 2r / 2) I,  C = diag(sinh 2r, -sinh 2r)/2.
CovarianceMatrix4 initial_twb(double r);

// e^{-Gamma/2} (R + R) mean, with R the phase rotation at angle omega0*t.
Eigen::Vector4d evolve_mean(const Eigen::Vector4d& mean_in, double Gamma,
                            double t, double omega0);

// Evolved covariance blocks:
//   A_t = e^{-Gamma} R A0 R^T + [[DG - (Dco - Psi),  Dsi + Pco],
//                                [Dsi + Pco,         DG + (Dco - Psi)]]
//   C_t = e^{-Gamma} R C0 R^T
// Requires sigma0 symmetric with A0 = B0. Secular mode zeroes the four
// oscillating kernel contributions.
CovarianceMatrix4 evolve_covariance(const CovarianceMatrix4& sigma0,
                                    const MemoryKernels& kernels, double omega0,
                                    PropagationMode mode);

}  // namespace twinbeam::propagator
