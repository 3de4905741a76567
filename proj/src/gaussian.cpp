#include "twinbeam/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace twinbeam::gaussian {

namespace {

constexpr double kSymTol = 1e-12;

void require_symmetric(const CovarianceMatrix4& sigma, const char* where) {
    if (sigma.max_asymmetry() > kSymTol) {
        throw std::invalid_argument(std::string(where) + ": sigma must be symmetric");
    }
}

double det2(const Eigen::Matrix2d& m) {
    return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
}

Eigen::Matrix4d symplectic_form() {
    Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();
    omega(0, 1) = 1.0;
    omega(1, 0) = -1.0;
    omega(2, 3) = 1.0;
    omega(3, 2) = -1.0;
    return omega;
}

}  // namespace

SymplecticInvariants invariants(const CovarianceMatrix4& sigma) {
    require_symmetric(sigma, "invariants");
    SymplecticInvariants inv;
    inv.I1 = det2(sigma.A());
    inv.I2 = det2(sigma.B());
    inv.I3 = det2(sigma.C());
    inv.I4 = sigma.m.determinant();
    return inv;
}

EofResult eof_symmetric(const CovarianceMatrix4& sigma, double tol_sym) {
    require_symmetric(sigma, "eof_symmetric");
    const SymplecticInvariants inv = invariants(sigma);
    if (std::fabs(inv.I1 - inv.I2) > tol_sym * std::max(inv.I1, inv.I2)) {
        throw std::invalid_argument(
            "eof_symmetric: formula restricted to symmetric states (det A != det B)");
    }

    if (!(inv.I1 > 0.0)) {
        throw std::invalid_argument("eof_symmetric: det A must be positive");
    }
    EofResult out;
    const double an = std::sqrt(inv.I1);
    const double q = inv.I1 * inv.I1 + inv.I3 * inv.I3 - inv.I4;
    double disc = q * q - 4.0 * inv.I1 * inv.I1 * inv.I3 * inv.I3;
    if (disc < 0.0) {
        if (disc < -1e-12) {
            out.physicality_warning = true;
        }
        disc = 0.0;
    }
    const double root = std::sqrt(disc);
    const double cp = std::sqrt(std::max((q + root) / (2.0 * inv.I1), 0.0));
    const double cm = std::sqrt(std::max((q - root) / (2.0 * inv.I1), 0.0));

    double k2 = (an - cp) * (an - cm);
    if (k2 < 0.0) {
        // below the vacuum floor; report and clamp
        out.physicality_warning = true;
        k2 = 1e-24;
    }
    out.kappa_minus = std::sqrt(k2);

    if (min_symplectic_eigenvalue(sigma) < 0.5 - 1e-6) {
        out.physicality_warning = true;
    }

    if (out.kappa_minus >= 0.5) {
        out.separable = true;
        out.x_m = 0.5;
        out.value = 0.0;
        return out;
    }
    out.x_m = (out.kappa_minus * out.kappa_minus + 0.25) / (2.0 * out.kappa_minus);
    const double p = out.x_m + 0.5;
    const double m = out.x_m - 0.5;
    out.value = p * std::log(p) - (m > 0.0 ? m * std::log(m) : 0.0);
    return out;
}

double min_symplectic_eigenvalue(const CovarianceMatrix4& sigma) {
    require_symmetric(sigma, "min_symplectic_eigenvalue");
    const Eigen::Matrix4d m = symplectic_form() * sigma.m;
    const Eigen::EigenSolver<Eigen::Matrix4d> solver(m, false);
    double nu = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
        nu = std::min(nu, std::abs(solver.eigenvalues()[i]));
    }
    return nu;
}

}  // namespace twinbeam::gaussian
