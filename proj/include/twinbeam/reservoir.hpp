// Lorentzian spectral-density models and the time-dependent master-equation
// coefficients Delta(t), Pi(t), gamma(t), r(t), available through two
// independent routes: closed forms built on the special functions, and a
// brute-force double-quadrature reference.

#pragma once

#include <optional>
#include <stdexcept>

namespace twinbeam::reservoir {

enum class SpectralKind { ZeroTLorentzian, HighTLorentzian };

// Reservoir kind plus width lambda; beta = 2 k_B T / hbar enters only the
// high-temperature kind.
struct SpectralModel {
    SpectralKind kind = SpectralKind::ZeroTLorentzian;
    double lambda = 0.0;
    double beta = 0.0;

    static SpectralModel zero_t(double lambda);
    static SpectralModel high_t(double lambda, double beta);
    void validate() const;  // throws std::invalid_argument on bad parameters
};

struct CouplingParams {
    double alpha = 0.0;   // dimensionless system-reservoir coupling
    double omega0 = 0.0;  // oscillator frequency
    void validate() const;
};

// Coefficient values at one time; all vanish at t = 0. rshift is provided by
// the quadrature route only.
struct CoefficientSample {
    double t = 0.0;
    double delta = 0.0;
    double pi = 0.0;
    double gamma = 0.0;
    std::optional<double> rshift;
};

struct QuadratureConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-9;
    // Floor on the directly integrated extent of the omega integral; the
    // alternating tail beyond it is estimated by series acceleration.
    // 0 means auto: 200 * max(omega0, lambda).
    double omega_cutoff = 0.0;
    int max_subdivisions = 30;  // recursion depth of the adaptive s-integral
    bool want_rshift = true;    // the frequency-shift integral is as costly
                                // as the damping one; callers may skip it
};

// Raised when the adaptive s-integral cannot reach the requested tolerance;
// carries the achieved error estimate.
class ConvergenceError : public std::runtime_error {
  public:
    ConvergenceError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_error_(achieved) {}
    double achieved_error() const { return achieved_error_; }

  private:
    double achieved_error_;
};

// J(omega) for the model kind; strictly positive for omega > 0.
double spectral_density(const SpectralModel& model, double omega);

// Thermal occupation factor in the two limits: 1 for the zero-T kind,
// beta/omega for the high-T kind (singular at omega = 0).
double thermal_weight(const SpectralModel& model, double omega);

// Closed-form coefficients. gamma for the high-T kind comes from its own
// kernel (the beta-scaled variant printed elsewhere fails the quadrature
// check and would make the stationary state temperature independent).
// rshift is not provided on this route.
CoefficientSample coeff_analytic(const SpectralModel& model,
                                 const CouplingParams& params, double t);

// Brute-force evaluation of the defining nested integrals; ground truth for
// coeff_analytic. The omega integral uses closed forms where the kernel
// admits one and half-period quadrature with accelerated tail estimation
// otherwise; the s integral is adaptive Simpson.
CoefficientSample coeff_quadrature(const SpectralModel& model,
                                   const CouplingParams& params, double t,
                                   const QuadratureConfig& cfg = {});

namespace detail {
// sin-moment of the Lorentzian: int_0^inf sin(omega s)/(omega^2+lambda^2) domega,
// evaluated numerically (no elementary closed form). Exposed for tests.
double lorentzian_sine_moment(double s, double lambda, const QuadratureConfig& cfg);
// Generic half-period integrator int_0^inf f(u) du for f = trig(u) * rational,
// used to cross-check the closed-form inner kernels. kind: 0 = sin/(u^2+a^2),
// 1 = u sin/(u^2+a^2), 2 = cos/(u^2+a^2).
double oscillatory_moment(int kind, double a);
}  // namespace detail

}  // namespace twinbeam::reservoir
