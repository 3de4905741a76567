#include "twinbeam/specfun.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace twinbeam::specfun {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240;
constexpr double kPiHalf = 1.57079632679489661923132169163975;

// Power series Si(x) = sum_k (-1)^k x^{2k+1} / ((2k+1)(2k+1)!), accumulated in
// extended precision: the terms grow to ~x e^x-ish magnitude before decaying,
// so double accumulation loses ~6 digits near the x = 20 switch point.
double si_series(double x) {
    const long double xl = x;
    const long double x2 = xl * xl;
    long double term = xl;  // k = 0
    long double sum = xl;
    for (int k = 1; k < 200; ++k) {
        const long double m = 2.0L * k;
        term *= -x2 / (m * (m + 1.0L));
        sum += term / (m + 1.0L);
        if (std::fabs(static_cast<double>(term)) <
            1e-19L * std::fabs(static_cast<double>(sum)) + 1e-300L) {
            break;
        }
    }
    return static_cast<double>(sum);
}

// Complex continued fraction for E1(i x) by modified Lentz; yields the
// auxiliary pair through Si(x) = pi/2 + Im[e^{-ix} w], Ci(x) = -Re[e^{-ix} w].
double si_continued_fraction(double x) {
    using C = std::complex<double>;
    constexpr double kFpMin = 1e-300;
    constexpr double kEps = 1e-16;
    C b(1.0, x);
    C c(1.0 / kFpMin, 0.0);
    C d = 1.0 / b;
    C h = d;
    for (int i = 1; i <= 2000; ++i) {
        const double a = -static_cast<double>(i) * static_cast<double>(i);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const C del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    h *= C(std::cos(x), -std::sin(x));
    return kPiHalf + h.imag();
}

// Ei(x) for 0 < x <= kEiSeriesMax: gamma + ln x + sum x^k/(k k!), all terms
// positive past the log.
double ei_series_pos(double x) {
    double term = 1.0;
    double sum = 0.0;
    for (int k = 1; k < 400; ++k) {
        term *= x / k;
        const double add = term / k;
        sum += add;
        if (add < 1e-17 * sum) break;
    }
    return kEulerGamma + std::log(x) + sum;
}

// Truncated asymptotic sum S(x) = sum_k k!/x^k, stopping at the smallest term.
// e^{-x} x Ei(x) -> S(x); valid once x is large enough that the smallest term
// is below the target accuracy (x >= 30 gives ~1e-12).
double ei_asymptotic_sum(double x, double sign) {
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 300; ++k) {
        const double next = term * sign * k / x;
        if (std::fabs(next) >= std::fabs(term)) break;
        sum += next;
        term = next;
        if (std::fabs(next) < 1e-17 * std::fabs(sum)) break;
    }
    return sum;
}

// E1(y) = e^{-y} cf(y) for y > 1 by the standard continued fraction
// (modified Lentz). Returns cf(y), the exponentially scaled value.
double e1_scaled_cf(double y) {
    constexpr double kFpMin = 1e-300;
    constexpr double kEps = 1e-16;
    double b = y + 1.0;
    double c = 1.0 / kFpMin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 2000; ++i) {
        const double a = -static_cast<double>(i) * static_cast<double>(i);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const double del = c * d;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

// E1(y) for 0 < y <= 1 by series: -gamma - ln y + sum (-1)^{k+1} y^k/(k k!).
double e1_series(double y) {
    double term = 1.0;
    double sum = 0.0;
    for (int k = 1; k < 60; ++k) {
        term *= -y / k;
        sum -= term / k;
        if (std::fabs(term) < 1e-18) break;
    }
    return -kEulerGamma - std::log(y) + sum;
}

constexpr double kSiSwitch = 20.0;
constexpr double kEiSeriesMax = 30.0;
constexpr double kEiOverflow = 709.0;
constexpr double kPairAsymptotic = 40.0;

}  // namespace

double si(double x) {
    if (!std::isfinite(x)) throw std::domain_error("si: non-finite argument");
    if (x < 0.0) return -si(-x);
    if (x == 0.0) return 0.0;
    if (x <= kSiSwitch) return si_series(x);
    return si_continued_fraction(x);
}

double ei(double x) {
    if (!std::isfinite(x)) throw std::domain_error("ei: non-finite argument");
    if (x == 0.0) throw std::domain_error("ei: singular at x = 0");
    if (x > kEiOverflow) {
        throw std::range_error("ei: e^x overflows for x > 709; use ei_scaled_pair");
    }
    if (x > 0.0) {
        if (x <= kEiSeriesMax) return ei_series_pos(x);
        return std::exp(x) / x * ei_asymptotic_sum(x, 1.0);
    }
    const double y = -x;
    if (y <= 1.0) return -e1_series(y);
    return -std::exp(-y) * e1_scaled_cf(y);
}

std::pair<double, double> ei_scaled_pair(double u) {
    if (!(u > 0.0) || !std::isfinite(u)) {
        throw std::domain_error("ei_scaled_pair: requires u > 0");
    }
    if (u >= kPairAsymptotic) {
        // e^{+u} Ei(-u) = -(1/u) sum (-1)^k k!/u^k
        // e^{-u} Ei(+u) = +(1/u) sum k!/u^k
        return {-ei_asymptotic_sum(u, -1.0) / u, ei_asymptotic_sum(u, 1.0) / u};
    }
    const double first = (u <= 1.0) ? std::exp(u) * (-e1_series(u)) : -e1_scaled_cf(u);
    const double second = std::exp(-u) * ei_series_pos(u);
    return {first, second};
}

}  // namespace twinbeam::specfun
