#include "twinbeam/reservoir.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "twinbeam/specfun.hpp"

namespace twinbeam::reservoir {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950;

// 16-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 8> kGlNodes = {
    0.09501250983763744018531934048571, 0.28160355077925891323046050146050,
    0.45801677765722738634241944298358, 0.61787624440264374844667176404879,
    0.75540440835500303389510119484744, 0.86563120238783174388046789771239,
    0.94457502307323257607798841553461, 0.98940093499164993259615417345033};
constexpr std::array<double, 8> kGlWeights = {
    0.18945061045506849628539672320828, 0.18260341504492358886676366796922,
    0.16915651939500253818931207903036, 0.14959598881657673208150173054748,
    0.12462897125553387205247628219202, 0.09515851168249278480992510760225,
    0.06225352393864789286284383699438, 0.02715245941175409485178057245602};

template <class F>
double gauss_legendre(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double x = h * kGlNodes[i];
        sum += kGlWeights[i] * (f(c + x) + f(c - x));
    }
    return h * sum;
}

// Sum of a tail of alternating half-period integrals by repeated averaging of
// the partial sums (Euler-style acceleration).
double accelerated_tail(const std::vector<double>& partial_sums) {
    std::vector<double> row = partial_sums;
    while (row.size() > 1) {
        for (std::size_t i = 0; i + 1 < row.size(); ++i) {
            row[i] = 0.5 * (row[i] + row[i + 1]);
        }
        row.pop_back();
    }
    return row[0];
}

// int_0^inf g(u) du with g oscillating at period 2*pi: direct half-period
// panels followed by the accelerated alternating tail.
template <class F>
double half_period_series(const F& g, double first_break, int direct_panels) {
    double total = 0.0;
    double lo = 0.0, hi = first_break;
    for (int k = 0; k < direct_panels; ++k) {
        total += gauss_legendre(g, lo, hi);
        lo = hi;
        hi += kPi;
    }
    constexpr int kTailTerms = 28;
    std::vector<double> sums(kTailTerms);
    double acc = 0.0;
    for (int k = 0; k < kTailTerms; ++k) {
        acc += gauss_legendre(g, lo, hi);
        sums[k] = acc;
        lo = hi;
        hi += kPi;
    }
    return total + accelerated_tail(sums);
}

// K(a) = int_0^inf sin(u)/(u^2+a^2) du. The first half-period is split at the
// peak scale for small a (integrand ~ u/(u^2+a^2) has structure at u ~ a).
double sine_kernel_moment(double a, int min_direct_panels) {
    const auto g = [a](double u) { return std::sin(u) / (u * u + a * a); };
    double head = 0.0;
    if (a < kPi / 2) {
        double lo = 0.0;
        double edge = std::max(a, 1e-14);
        while (lo < kPi) {
            const double hi = std::min(edge, kPi);
            head += gauss_legendre(g, lo, hi);
            lo = hi;
            edge *= 4.0;
        }
    } else {
        head = gauss_legendre(g, 0.0, kPi);
    }
    const int direct = std::clamp(min_direct_panels, 16, 64);
    double total = head;
    double lo = kPi, hi = 2 * kPi;
    for (int k = 1; k < direct; ++k) {
        total += gauss_legendre(g, lo, hi);
        lo = hi;
        hi += kPi;
    }
    constexpr int kTailTerms = 28;
    std::vector<double> sums(kTailTerms);
    double acc = 0.0;
    for (int k = 0; k < kTailTerms; ++k) {
        acc += gauss_legendre(g, lo, hi);
        sums[k] = acc;
        lo = hi;
        hi += kPi;
    }
    return total + accelerated_tail(sums);
}

struct AdaptiveBudget {
    double tol;
    int max_depth;
    double worst_panel_error = 0.0;
    bool converged = true;
};

// Relative tolerances below the inner integrators' own noise floor would
// recurse forever; panels never chase tighter than this.
constexpr double kPanelTolFloor = 4e-12;

template <class F>
double adaptive_simpson_rec(const F& f, double a, double fa, double b, double fb,
                            double fm, double whole, double tol, int depth,
                            AdaptiveBudget& budget) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double err = (left + right - whole) / 15.0;
    if (std::fabs(err) <= std::max(tol, kPanelTolFloor) || depth <= 0) {
        if (std::fabs(err) > std::max(tol, kPanelTolFloor)) {
            budget.converged = false;
            budget.worst_panel_error = std::max(budget.worst_panel_error, std::fabs(err));
        }
        return left + right + err;
    }
    return adaptive_simpson_rec(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1, budget) +
           adaptive_simpson_rec(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1, budget);
}

// Adaptive Simpson over [0, t] with an oscillation-aware initial partition.
template <class F>
double outer_integral(const F& f, double t, double panel_scale,
                      const QuadratureConfig& cfg, const char* what) {
    if (t <= 0.0) return 0.0;
    const int n0 = std::max(4, static_cast<int>(std::ceil(t / panel_scale)));
    const double h = t / n0;
    AdaptiveBudget budget{std::max(cfg.abs_tol, 0.0) / n0, cfg.max_subdivisions};
    double total = 0.0;
    double a = 0.0;
    double fa = f(0.0);
    for (int i = 0; i < n0; ++i) {
        const double b = (i + 1 == n0) ? t : a + h;
        const double fb = f(b);
        const double fm = f(0.5 * (a + b));
        const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        total += adaptive_simpson_rec(f, a, fa, b, fb, fm, whole, budget.tol,
                                      budget.max_depth, budget);
        a = b;
        fa = fb;
    }
    const double allowed = std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(total));
    if (!budget.converged && budget.worst_panel_error * n0 > allowed) {
        throw ConvergenceError(std::string("coeff_quadrature: s-integral for ") + what +
                                   " did not reach tolerance",
                               budget.worst_panel_error * n0);
    }
    return total;
}

}  // namespace

SpectralModel SpectralModel::zero_t(double lambda) {
    SpectralModel m{SpectralKind::ZeroTLorentzian, lambda, 0.0};
    m.validate();
    return m;
}

SpectralModel SpectralModel::high_t(double lambda, double beta) {
    SpectralModel m{SpectralKind::HighTLorentzian, lambda, beta};
    m.validate();
    return m;
}

void SpectralModel::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("SpectralModel: lambda must be > 0");
    }
    if (kind == SpectralKind::HighTLorentzian &&
        (!(beta > 0.0) || !std::isfinite(beta))) {
        throw std::invalid_argument("SpectralModel: beta must be > 0 for the high-T kind");
    }
}

void CouplingParams::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("CouplingParams: alpha must be > 0");
    }
    if (!(omega0 > 0.0) || !std::isfinite(omega0)) {
        throw std::invalid_argument("CouplingParams: omega0 must be > 0");
    }
}

double spectral_density(const SpectralModel& model, double omega) {
    if (!(omega >= 0.0)) throw std::domain_error("spectral_density: omega must be >= 0");
    const double denom = omega * omega + model.lambda * model.lambda;
    switch (model.kind) {
        case SpectralKind::ZeroTLorentzian:
            return 1.0 / denom;
        case SpectralKind::HighTLorentzian:
            return omega / denom;
    }
    return 0.0;
}

double thermal_weight(const SpectralModel& model, double omega) {
    if (model.kind == SpectralKind::ZeroTLorentzian) return 1.0;
    if (!(omega > 0.0)) {
        throw std::domain_error("thermal_weight: 1/omega singular at omega <= 0");
    }
    return model.beta / omega;
}

CoefficientSample coeff_analytic(const SpectralModel& model,
                                 const CouplingParams& params, double t) {
    model.validate();
    params.validate();
    if (!(t >= 0.0)) throw std::domain_error("coeff_analytic: t must be >= 0");
    CoefficientSample out;
    out.t = t;
    if (t == 0.0) return out;

    const double lam = model.lambda;
    const double w0 = params.omega0;
    const double a2 = params.alpha * params.alpha;
    const double X = w0 * w0 + lam * lam;
    const double pref = kPi * a2 / (2.0 * X);
    const double elt = std::exp(-lam * t);
    const double cwt = std::cos(w0 * t);
    const double swt = std::sin(w0 * t);

    const double delta0 = pref * (elt * ((w0 / lam) * swt - cwt) + 1.0);
    const double pi0 = pref * ((w0 / lam) * (1.0 - cwt * elt) - swt * elt);

    if (model.kind == SpectralKind::ZeroTLorentzian) {
        out.delta = delta0;
        out.pi = pi0;
        const auto [ep, em] = specfun::ei_scaled_pair(lam * t);
        out.gamma = a2 / X * (specfun::si(w0 * t)
                              + (w0 / (2.0 * lam)) * cwt * (ep - em)
                              - 0.5 * swt * (ep + em));
    } else {
        out.delta = model.beta * delta0;
        out.pi = model.beta * pi0;
        // own kernel: int_0^inf w sin(ws)/(w^2+l^2) dw = (pi/2) e^{-l s}
        out.gamma = a2 * (kPi / 2.0) / X * (w0 - elt * (w0 * cwt + lam * swt));
    }
    return out;
}

namespace detail {

double lorentzian_sine_moment(double s, double lambda, const QuadratureConfig& cfg) {
    if (s == 0.0) return 0.0;
    // substitute u = omega * s: s * int_0^inf sin u / (u^2 + (lambda s)^2) du
    const double cutoff = cfg.omega_cutoff > 0.0 ? cfg.omega_cutoff : 0.0;
    const int want = cutoff > 0.0 ? static_cast<int>(std::ceil(cutoff * s / kPi)) : 48;
    return s * sine_kernel_moment(lambda * s, want);
}

double oscillatory_moment(int kind, double a) {
    switch (kind) {
        case 0:
            return sine_kernel_moment(a, 48);
        case 1: {
            const auto g = [a](double u) { return u * std::sin(u) / (u * u + a * a); };
            return half_period_series(g, kPi, 48);
        }
        case 2: {
            // cos kernel: half-periods of cos start at pi/2
            const auto g = [a](double u) { return std::cos(u) / (u * u + a * a); };
            if (a < kPi / 4) {
                double head = 0.0, lo = 0.0, edge = std::max(a, 1e-14);
                while (lo < kPi / 2) {
                    const double hi = std::min(edge, kPi / 2);
                    head += gauss_legendre(g, lo, hi);
                    lo = hi;
                    edge *= 4.0;
                }
                const auto rest = [&g](double u) { return g(u); };
                double total = head, l2 = kPi / 2, h2 = 3 * kPi / 2;
                for (int k = 0; k < 47; ++k) {
                    total += gauss_legendre(rest, l2, h2);
                    l2 = h2;
                    h2 += kPi;
                }
                std::vector<double> sums(28);
                double acc = 0.0;
                for (int k = 0; k < 28; ++k) {
                    acc += gauss_legendre(rest, l2, h2);
                    sums[k] = acc;
                    l2 = h2;
                    h2 += kPi;
                }
                return total + accelerated_tail(sums);
            }
            return half_period_series(g, kPi / 2, 48);
        }
        default:
            throw std::invalid_argument("oscillatory_moment: unknown kind");
    }
}

}  // namespace detail

CoefficientSample coeff_quadrature(const SpectralModel& model,
                                   const CouplingParams& params, double t,
                                   const QuadratureConfig& cfg) {
    model.validate();
    params.validate();
    if (!(cfg.abs_tol > 0.0) || !(cfg.rel_tol > 0.0)) {
        throw std::invalid_argument("QuadratureConfig: tolerances must be > 0");
    }
    if (!(t >= 0.0)) throw std::domain_error("coeff_quadrature: t must be >= 0");
    CoefficientSample out;
    out.t = t;
    out.rshift = 0.0;
    if (t == 0.0) return out;

    const double lam = model.lambda;
    const double w0 = params.omega0;
    const double a2 = params.alpha * params.alpha;
    const double panel = std::min({kPi / (2.0 * w0), 0.25 / lam, t});

    // cos-moment of both thermalized kernels is (pi/(2 lam)) e^{-lam s},
    // scaled by beta for the high-T kind where J*(2N+1) = beta/(w^2+lam^2).
    const double therm = (model.kind == SpectralKind::HighTLorentzian) ? model.beta : 1.0;
    const auto cos_moment = [&](double s) { return therm * (kPi / (2.0 * lam)) * std::exp(-lam * s); };

    out.delta = a2 * outer_integral(
        [&](double s) { return cos_moment(s) * std::cos(w0 * s); }, t, panel, cfg, "delta");
    out.pi = a2 * outer_integral(
        [&](double s) { return cos_moment(s) * std::sin(w0 * s); }, t, panel, cfg, "pi");

    if (model.kind == SpectralKind::ZeroTLorentzian) {
        const auto sine_moment = [&](double s) {
            return detail::lorentzian_sine_moment(s, lam, cfg);
        };
        out.gamma = a2 * outer_integral(
            [&](double s) { return sine_moment(s) * std::sin(w0 * s); }, t, panel, cfg, "gamma");
        if (cfg.want_rshift) {
            out.rshift = a2 * outer_integral(
                [&](double s) { return sine_moment(s) * std::cos(w0 * s); }, t, panel, cfg, "rshift");
        } else {
            out.rshift.reset();
        }
    } else {
        // J sin-moment: int_0^inf w sin(ws)/(w^2+lam^2) dw = (pi/2) e^{-lam s}
        const auto sine_moment = [&](double s) { return (kPi / 2.0) * std::exp(-lam * s); };
        out.gamma = a2 * outer_integral(
            [&](double s) { return sine_moment(s) * std::sin(w0 * s); }, t, panel, cfg, "gamma");
        out.rshift = a2 * outer_integral(
            [&](double s) { return sine_moment(s) * std::cos(w0 * s); }, t, panel, cfg, "rshift");
    }
    return out;
}

}  // namespace twinbeam::reservoir
