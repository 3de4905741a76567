#include "twinbeam/propagator.hpp"

#include <cmath>
#include <stdexcept>

namespace twinbeam::propagator {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950;

Eigen::Matrix2d rotation(double angle) {
    Eigen::Matrix2d r;
    r << std::cos(angle), std::sin(angle), -std::sin(angle), std::cos(angle);
    return r;
}

// Prefix Simpson of f on a uniform grid: even nodes by the composite rule,
// odd nodes by the 3-point half-panel rule (forward, backward at the end).
std::vector<double> prefix_simpson(const std::vector<double>& f, double dt) {
    const std::size_t n = f.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        if (i % 2 == 0) {
            out[i] = out[i - 2] + dt / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
        } else if (i + 1 < n) {
            out[i] = out[i - 1] + dt / 12.0 * (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1]);
        } else {
            out[i] = out[i - 1] + dt / 12.0 * (-f[i - 2] + 8.0 * f[i - 1] + 5.0 * f[i]);
        }
    }
    return out;
}

// y_i = e^{-Gamma_i} int_0^{t_i} e^{Gamma(s)} f(s) ds with the same stencil,
// keeping every exponent a local Gamma difference so large Gamma never
// overflows.
std::vector<double> weighted_prefix_simpson(const std::vector<double>& gamma_big,
                                            const std::vector<double>& f, double dt) {
    const std::size_t n = f.size();
    std::vector<double> out(n, 0.0);
    auto w = [&](std::size_t j, std::size_t i) {
        return std::exp(gamma_big[j] - gamma_big[i]);
    };
    for (std::size_t i = 1; i < n; ++i) {
        if (i % 2 == 0) {
            out[i] = out[i - 2] * w(i - 2, i) +
                     dt / 3.0 * (f[i - 2] * w(i - 2, i) + 4.0 * f[i - 1] * w(i - 1, i) + f[i]);
        } else if (i + 1 < n) {
            out[i] = out[i - 1] * w(i - 1, i) +
                     dt / 12.0 * (5.0 * f[i - 1] * w(i - 1, i) + 8.0 * f[i] - f[i + 1] * w(i + 1, i));
        } else {
            out[i] = out[i - 1] * w(i - 1, i) +
                     dt / 12.0 * (-f[i - 2] * w(i - 2, i) + 8.0 * f[i - 1] * w(i - 1, i) + 5.0 * f[i]);
        }
    }
    return out;
}

}  // namespace

void TimeGrid::validate(double omega0) const {
    if (n_steps < 2) throw std::invalid_argument("TimeGrid: n_steps must be >= 2");
    if (!(t_max > 0.0) || !std::isfinite(t_max)) {
        throw std::invalid_argument("TimeGrid: t_max must be > 0");
    }
    if (2.0 * omega0 * dt() > kPi / 4.0 + 1e-15) {
        throw std::invalid_argument(
            "TimeGrid: dt too coarse, need 2*omega0*dt <= pi/4");
    }
}

std::vector<MemoryKernels> kernels_on_grid(
    const reservoir::SpectralModel& model, const reservoir::CouplingParams& params,
    const TimeGrid& grid, PropagationMode mode, CoefficientSource source,
    const reservoir::QuadratureConfig& quad_cfg) {
    grid.validate(params.omega0);
    const int n = grid.n_steps;
    const double dt = grid.dt();
    const double w0 = params.omega0;

    reservoir::QuadratureConfig qcfg = quad_cfg;
    qcfg.want_rshift = false;  // kernels never consume the frequency shift

    std::vector<double> gam(n + 1), del(n + 1), pi(n + 1), ts(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double t = i * dt;
        ts[i] = t;
        const reservoir::CoefficientSample c =
            (source == CoefficientSource::Analytic)
                ? reservoir::coeff_analytic(model, params, t)
                : reservoir::coeff_quadrature(model, params, t, qcfg);
        gam[i] = c.gamma;
        del[i] = c.delta;
        pi[i] = c.pi;
    }

    std::vector<double> g2(n + 1);
    for (int i = 0; i <= n; ++i) g2[i] = 2.0 * gam[i];
    const std::vector<double> Gamma = prefix_simpson(g2, dt);
    const std::vector<double> DG = weighted_prefix_simpson(Gamma, del, dt);

    std::vector<MemoryKernels> out(n + 1);
    if (mode == PropagationMode::Exact) {
        std::vector<double> dc(n + 1), ds(n + 1), pc(n + 1), ps(n + 1);
        for (int i = 0; i <= n; ++i) {
            const double c2 = std::cos(2.0 * w0 * ts[i]);
            const double s2 = std::sin(2.0 * w0 * ts[i]);
            dc[i] = del[i] * c2;
            ds[i] = del[i] * s2;
            pc[i] = pi[i] * c2;
            ps[i] = pi[i] * s2;
        }
        const std::vector<double> Dc = weighted_prefix_simpson(Gamma, dc, dt);
        const std::vector<double> Ds = weighted_prefix_simpson(Gamma, ds, dt);
        const std::vector<double> Pc = weighted_prefix_simpson(Gamma, pc, dt);
        const std::vector<double> Ps = weighted_prefix_simpson(Gamma, ps, dt);
        for (int i = 0; i <= n; ++i) {
            const double c2 = std::cos(2.0 * w0 * ts[i]);
            const double s2 = std::sin(2.0 * w0 * ts[i]);
            MemoryKernels& k = out[i];
            k.t = ts[i];
            k.Gamma = Gamma[i];
            k.DeltaGamma = DG[i];
            k.DeltaCo = c2 * Dc[i] + s2 * Ds[i];
            k.DeltaSi = s2 * Dc[i] - c2 * Ds[i];
            k.PiCo = c2 * Pc[i] + s2 * Ps[i];
            k.PiSi = s2 * Pc[i] - c2 * Ps[i];
        }
    } else {
        for (int i = 0; i <= n; ++i) {
            out[i].t = ts[i];
            out[i].Gamma = Gamma[i];
            out[i].DeltaGamma = DG[i];
        }
    }
    return out;
}

CovarianceMatrix4 initial_twb(double r) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
        throw std::domain_error("initial_twb: r must be >= 0");
    }
    const double a = 0.5 * std::cosh(2.0 * r);
    const double c = 0.5 * std::sinh(2.0 * r);
    Eigen::Matrix2d A = a * Eigen::Matrix2d::Identity();
    Eigen::Matrix2d C;
    C << c, 0.0, 0.0, -c;
    return CovarianceMatrix4::from_blocks(A, A, C);
}

Eigen::Vector4d evolve_mean(const Eigen::Vector4d& mean_in, double Gamma, double t,
                            double omega0) {
    const Eigen::Matrix2d R = rotation(omega0 * t);
    Eigen::Vector4d out;
    out.head<2>() = R * mean_in.head<2>();
    out.tail<2>() = R * mean_in.tail<2>();
    return std::exp(-0.5 * Gamma) * out;
}

CovarianceMatrix4 evolve_covariance(const CovarianceMatrix4& sigma0,
                                    const MemoryKernels& kernels, double omega0,
                                    PropagationMode mode) {
    if (sigma0.max_asymmetry() > 1e-12) {
        throw std::invalid_argument("evolve_covariance: sigma0 must be symmetric");
    }
    if ((sigma0.A() - sigma0.B()).cwiseAbs().maxCoeff() > 1e-12) {
        throw std::invalid_argument("evolve_covariance: requires A0 = B0");
    }
    const double emg = std::exp(-kernels.Gamma);
    const Eigen::Matrix2d R = rotation(omega0 * kernels.t);

    Eigen::Matrix2d noise = Eigen::Matrix2d::Zero();
    noise(0, 0) = kernels.DeltaGamma;
    noise(1, 1) = kernels.DeltaGamma;
    if (mode == PropagationMode::Exact) {
        const double diag = kernels.DeltaCo - kernels.PiSi;
        const double off = kernels.DeltaSi + kernels.PiCo;
        noise(0, 0) -= diag;
        noise(1, 1) += diag;
        noise(0, 1) = off;
        noise(1, 0) = off;
    }

    Eigen::Matrix2d At = emg * (R * sigma0.A() * R.transpose()) + noise;
    Eigen::Matrix2d Ct = emg * (R * sigma0.C() * R.transpose());
    // symmetrize away rotation round-off so A_t = B_t and sigma = sigma^T hold
    // to machine precision
    At = 0.5 * (At + At.transpose()).eval();
    return CovarianceMatrix4::from_blocks(At, At, Ct);
}

}  // namespace twinbeam::propagator
