// Two-mode Gaussian state algebra: symplectic invariants, minimum symplectic
// eigenvalue, and entanglement of formation for symmetric states.

#pragma once

#include "twinbeam/state.hpp"

namespace twinbeam::gaussian {

struct SymplecticInvariants {
    double I1 = 0.0;  // det A
    double I2 = 0.0;  // det B
    double I3 = 0.0;  // det C (may be negative)
    double I4 = 0.0;  // det sigma
};

struct EofResult {
    double kappa_minus = 0.0;  // minimum symplectic eigenvalue of the
                               // partially transposed state
    double x_m = 0.0;
    double value = 0.0;        // nats; 0 iff separable
    bool separable = false;
    bool physicality_warning = false;  // state itself below the vacuum floor
};

// Block determinants (exact 2x2 arithmetic). Throws std::invalid_argument on
// asymmetric input.
SymplecticInvariants invariants(const CovarianceMatrix4& sigma);

// Entanglement of formation for symmetric states (|I1 - I2| within tol_sym
// relatively); value in nats, clamped to 0 for kappa_minus >= 1/2.
EofResult eof_symmetric(const CovarianceMatrix4& sigma, double tol_sym = 1e-8);

// Smallest modulus among the eigenvalues of i*Omega*sigma; >= 1/2 for
// physical states in the vacuum-is-1/2 convention.
double min_symplectic_eigenvalue(const CovarianceMatrix4& sigma);

}  // namespace twinbeam::gaussian
