#pragma once

#include <cmath>
#include <vector>

#include "pwf/common.hpp"
#include "pwf/grid.hpp"

namespace pwf {

/// Parameters of the background and of the band-limited realization of the
/// retarded propagator.
struct GreenSpec {
    double n = 1.0;          // uniform background refractive index
    double k_max = 0.0;      // band limit of the spectral form
    double apod_width = 0.0; // taper width below k_max (0: no taper)
    int taper_power = 2;     // cos^p roll-off; higher p decays faster off-shell
    double r_min = 1e-6;     // regularization radius for the 1/R kernel

    void validate() const {
        if (!(n >= 1.0)) fail("GreenSpec: n must be >= 1");
        if (!(k_max > 0.0)) fail("GreenSpec: k_max must be > 0");
        if (!(apod_width >= 0.0) || apod_width > k_max)
            fail("GreenSpec: apodization width must lie in [0, k_max]");
        if (taper_power < 1) fail("GreenSpec: taper power must be >= 1");
        if (!(r_min > 0.0)) fail("GreenSpec: r_min must be > 0");
    }

    /// Flat-top taper: 1 inside the band, cos^p roll-off over apod_width.
    double apod(double k) const {
        const double k1 = k_max - apod_width;
        if (k <= k1) return 1.0;
        if (k >= k_max) return 0.0;
        const double u = (k - k1) / (k_max - k1);
        return std::pow(std::cos(0.5 * pi * u), taper_power);
    }
};

namespace detail {

/// Composite Gauss-Legendre quadrature of fn over [0, k_max], resolved
/// against `cycles` oscillation periods. The interval is split at the
/// taper joint, where the apodization loses smoothness.
template <class Fn>
complexd oscillatory_quad(const GreenSpec& spec, double cycles, Fn&& fn) {
    static const double gl_x[4] = {0.0694318442029737, 0.3300094782075719,
                                   0.6699905217924281, 0.9305681557970263};
    static const double gl_w[4] = {0.1739274225687269, 0.3260725774312731,
                                   0.3260725774312731, 0.1739274225687269};
    const int panels = std::max(24, static_cast<int>(std::ceil(cycles * 4.0)) + 8);
    const double density = panels / spec.k_max;

    complexd acc{};
    auto integrate = [&](double lo, double hi) {
        if (!(hi > lo)) return;
        const int np = std::max(4, static_cast<int>(std::ceil((hi - lo) * density)));
        const double h = (hi - lo) / np;
        for (int p = 0; p < np; ++p) {
            const double a = lo + p * h;
            for (int q = 0; q < 4; ++q) acc += gl_w[q] * h * fn(a + gl_x[q] * h);
        }
    };
    const double joint = spec.k_max - spec.apod_width;
    integrate(0.0, joint);
    integrate(joint, spec.k_max);
    return acc;
}

} // namespace detail

/// Regularized sample of the retarded propagator
///   G+(r,t; r',t') = (c / (4 pi |r-r'|)) delta(|r-r'| - (t-t') c/n),
/// with the delta realized as the triangular kernel matching linear
/// interpolation of a source sampled at spacing dt_src. Anti-causal
/// arguments (t <= t') return exactly zero; G- never contributes.
struct RetardedSample {
    double weight = 0.0;
    bool regularized = false;  // |r - r'| fell below r_min
};

inline RetardedSample green_retarded(const Vec3& r, double t, const Vec3& r_src, double t_src,
                                     const GreenSpec& spec, double dt_src) {
    spec.validate();
    if (!(dt_src > 0.0)) fail("green_retarded: source sample spacing must be > 0");
    RetardedSample out;
    const double tau = t - t_src;
    if (tau <= 0.0) return out;  // causality
    double R = norm(Vec3{r[0] - r_src[0], r[1] - r_src[1], r[2] - r_src[2]});
    if (R < spec.r_min) {
        R = spec.r_min;
        out.regularized = true;
    }
    // delta(R - tau c/n) smeared over the source spacing expressed in range:
    // half-width c dt_src / n, triangular, unit integral in R.
    const double halfwidth = c_internal * dt_src / spec.n;
    const double x = (R - tau * c_internal / spec.n) / halfwidth;
    if (std::abs(x) >= 1.0) return out;
    const double delta_h = (1.0 - std::abs(x)) / halfwidth;
    out.weight = c_internal / (4.0 * pi * R) * delta_h;
    return out;
}

/// Band-limited spectral evaluation of the retarded propagator,
///   G+(R, dt) = (c / (8 pi^2 R)) Integral dk e^{i k R} e^{-i w dt} apod,
/// over the symmetric k line with w = k c / n. Converges to the delta form
/// as k_max grows; only causal separations (dt > 0) are admitted.
inline complexd green_spectral(double R, double dtau, const GreenSpec& spec) {
    spec.validate();
    if (!(dtau > 0.0)) fail("green_spectral: requires t > t'");
    if (R < spec.r_min) R = spec.r_min;
    const double x = R - c_internal * dtau / spec.n;
    const double cycles = spec.k_max * (std::abs(x) + 1.0) / (2.0 * pi);
    // even apodization collapses the symmetric line to a cosine transform
    const complexd integral = detail::oscillatory_quad(
        spec, cycles, [&](double k) { return complexd(std::cos(k * x) * spec.apod(k), 0.0); });
    return c_internal / (4.0 * pi * pi * R) * integral;
}

inline complexd green_spectral(const Vec3& dr, double dtau, const GreenSpec& spec) {
    return green_spectral(norm(dr), dtau, spec);
}

/// Mixed time derivative of the paper-form spectral propagator
///   (2 i c / (2pi)^3) Integral d3k (1/k) e^{i(k.dr - w dt)},
/// i.e. d^2/dt dt' inserts w^2 into the radial integral:
///   (i c / (pi^2 R)) Integral dk sin(kR) w^2 e^{-i w dt} apod.
inline complexd green_spectral_mixed_dtdtp(double R, double dtau, const GreenSpec& spec) {
    spec.validate();
    if (!(dtau > 0.0)) fail("green_spectral_mixed_dtdtp: requires t > t'");
    const bool tiny_r = R < 1e-12;
    const double cycles = spec.k_max * (R + c_internal * dtau / spec.n + 1.0) / (2.0 * pi);
    const complexd integral = detail::oscillatory_quad(spec, cycles, [&](double k) {
        const double w = c_internal * k / spec.n;
        const double radial = tiny_r ? k : std::sin(k * R) / R;
        return radial * w * w * spec.apod(k) * std::exp(-iunit * w * dtau);
    });
    return iunit * c_internal / (pi * pi) * integral;
}

} // namespace pwf
