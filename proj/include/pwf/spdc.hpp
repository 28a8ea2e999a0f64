#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "pwf/common.hpp"
#include "pwf/green.hpp"
#include "pwf/grid.hpp"

namespace pwf {

/// Incident extraordinary-polarized pump, described analytically and
/// sampled on a frequency x transverse-wavevector grid on demand. The
/// transverse treatment uses at most one dimension (slab geometry); the
/// collinear mode drops it entirely.
struct PumpSpectrum {
    enum class Model { monochromatic, gaussian };
    Model model = Model::gaussian;
    double omega0 = 0.0;       // central frequency
    double sigma_omega = 0.0;  // spectral width (gaussian model)
    double waist = 0.0;        // beam waist; 0 means a transverse plane wave
    int q_dims = 0;            // 0 (collinear) or 1 transverse dimension

    void validate() const {
        if (!(omega0 > 0.0)) fail("PumpSpectrum: omega0 must be > 0");
        if (model == Model::gaussian && !(sigma_omega > 0.0))
            fail("PumpSpectrum: gaussian model needs sigma_omega > 0");
        if (q_dims < 0 || q_dims > 1) fail("PumpSpectrum: q_dims must be 0 or 1");
    }

    bool monochromatic() const { return model == Model::monochromatic; }

    /// Spectral envelope in omega (amplitude, not density) for the gaussian
    /// model; the monochromatic model is handled as an analytic delta.
    double spectral_envelope(double w3) const {
        if (monochromatic()) return w3 == omega0 ? 1.0 : 0.0;
        const double u = (w3 - omega0) / sigma_omega;
        return std::exp(-0.5 * u * u);
    }

    /// True when the transverse profile is a plane wave (delta at q3 = 0).
    bool plane_transverse() const { return q_dims == 0 || waist <= 0.0; }

    /// Transverse profile in q for a waist-w gaussian beam,
    /// exp(-q^2 w^2 / 4). A plane-wave pump is a delta at q3 = 0 and is
    /// handled analytically by the assembly, not through this envelope.
    double transverse_envelope(double q3) const {
        if (plane_transverse()) return q3 == 0.0 ? 1.0 : 0.0;
        return std::exp(-q3 * q3 * waist * waist / 4.0);
    }

    complexd amplitude(double w3, double q3) const {
        return complexd(spectral_envelope(w3) * transverse_envelope(q3), 0.0);
    }

    /// Paraxial guard on a sampled q range: |q|/k3 must stay below 0.2,
    /// with a warning above 0.1. k3 is evaluated in the crystal medium.
    void check_paraxial(double q_max, double n_medium) const {
        if (q_dims == 0 || q_max <= 0.0) return;
        const double k3 = n_medium * omega0 / c_internal;
        const double ratio = q_max / k3;
        if (ratio > 0.2)
            fail("PumpSpectrum: |q|/k = " + std::to_string(ratio) +
                 " violates the paraxial bound 0.2");
        if (ratio > 0.1)
            warn("PumpSpectrum: |q|/k = " + std::to_string(ratio) +
                 " strains the paraxial approximation");
    }
};

/// Nonlinear crystal slab: effective quadratic coupling, thickness along z,
/// transverse extent, shared linear index (the crystal is treated as
/// immersed in a medium with the same linear response), and the finite
/// interaction time window.
struct CrystalSpec {
    double chi2 = 1.0;             // effective chi(2)_ooe + chi(2)_oeo
    double length = 1.0;           // L along z
    double transverse_width = 0.0; // W per transverse dim; <= 0: infinite
    double n = 1.5;                // shared refractive index
    double interaction_time = 0.0; // T; <= 0: effectively infinite
    enum class Window { gaussian, box } window = Window::gaussian;

    void validate() const {
        if (!(length > 0.0)) fail("CrystalSpec: length must be > 0");
        if (!(n > 1.0)) fail("CrystalSpec: n must be > 1");
        if (!std::isfinite(chi2)) fail("CrystalSpec: chi2 must be real and finite");
    }

    bool infinite_transverse() const { return transverse_width <= 0.0; }
    bool infinite_time() const { return interaction_time <= 0.0; }

    /// Frequency window from the finite interaction time. The gaussian
    /// window has standard deviation T/2 in time, so the squared response
    /// concentrates well within |dw| <= 2 pi / T; the box window gives
    /// T sinc(dw T / 2).
    double time_window(double dw) const {
        if (infinite_time()) return 1.0;
        if (window == Window::box) {
            const double x = 0.5 * dw * interaction_time;
            return interaction_time * (x == 0.0 ? 1.0 : std::sin(x) / x);
        }
        const double sig_t = 0.5 * interaction_time;
        return interaction_time * std::exp(-0.5 * dw * dw * sig_t * sig_t);
    }

    /// Transverse aperture window (box crystal): W sinc(dq W / 2).
    double transverse_window(double dq) const {
        if (infinite_transverse()) return 1.0;
        const double x = 0.5 * dq * transverse_width;
        return transverse_width * (x == 0.0 ? 1.0 : std::sin(x) / x);
    }
};

/// Longitudinal wavenumber k_z(w, q) = sqrt((n w / c)^2 - q^2); evanescent
/// combinations are reported so callers can zero and flag them.
struct Kz {
    double value = 0.0;
    bool evanescent = false;
};

inline Kz longitudinal_wavenumber(double omega, double q, double n) {
    const double k2 = std::pow(n * omega / c_internal, 2) - q * q;
    if (k2 < 0.0) return {0.0, true};
    return {std::sqrt(k2), false};
}

/// Finite-thickness phase matching: integral of e^{i dkz z} over the slab,
/// L sinc(dkz L / 2). Real for the symmetric slab; returned as complex.
inline complexd phase_matching_factor(double dkz, double L) {
    if (!(L > 0.0)) fail("phase_matching_factor: L must be > 0");
    const double x = 0.5 * dkz * L;
    const double s = (x == 0.0) ? 1.0 : std::sin(x) / x;
    return complexd(L * s, 0.0);
}

/// Axes of the two-photon amplitude grid: a frequency axis per photon and
/// an optional single transverse-wavevector axis.
struct JsaAxes {
    int n_omega = 0;
    double omega_min = 0.0, omega_max = 0.0;
    int n_q = 0;       // 0: collinear (no q axis)
    double q_max = 0.0;

    void validate() const {
        if (n_omega < 2) fail("JsaAxes: need at least 2 frequency samples");
        if (!(omega_min > 0.0) || !(omega_max > omega_min)) fail("JsaAxes: bad omega range");
        if (n_q < 0) fail("JsaAxes: n_q must be >= 0");
        if (n_q > 0 && (!(q_max > 0.0) || n_q < 2)) fail("JsaAxes: bad q axis");
    }

    int per_photon() const { return n_omega * std::max(n_q, 1); }
    double d_omega() const { return (omega_max - omega_min) / (n_omega - 1); }
    double d_q() const { return n_q > 1 ? 2.0 * q_max / (n_q - 1) : 1.0; }
    double omega(int i) const { return omega_min + d_omega() * (i / std::max(n_q, 1)); }
    double q(int i) const {
        if (n_q == 0) return 0.0;
        return -q_max + d_q() * (i % n_q);
    }
    /// Integration measure of one per-photon cell.
    double cell() const { return d_omega() * (n_q > 0 ? d_q() : 1.0); }

    /// Trapezoid node weight (1/2 on axis endpoints); the grid measure is
    /// node_weight(i) * cell(), which keeps boundary-touching structures at
    /// second-order quadrature accuracy.
    double node_weight(int i) const {
        const int iw = i / std::max(n_q, 1);
        double w = (iw == 0 || iw == n_omega - 1) ? 0.5 : 1.0;
        if (n_q > 1) {
            const int iq = i % n_q;
            if (iq == 0 || iq == n_q - 1) w *= 0.5;
        }
        return w;
    }
};

/// Two-photon amplitude on the product grid, kept symmetrized and at unit
/// L2 norm (the overall constant is not physical).
struct JsaGrid {
    JsaAxes axes;
    std::vector<complexd> amp;  // index1 * per_photon + index2

    explicit JsaGrid(const JsaAxes& a = {}) : axes(a) {
        if (a.n_omega > 0) amp.assign(std::size_t(a.per_photon()) * a.per_photon(), complexd{});
    }

    complexd& at(int i1, int i2) { return amp[std::size_t(i1) * axes.per_photon() + i2]; }
    complexd at(int i1, int i2) const { return amp[std::size_t(i1) * axes.per_photon() + i2]; }

    double l2_norm2() const {
        const int n = axes.per_photon();
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                s += axes.node_weight(i) * axes.node_weight(j) * std::norm(at(i, j));
        return s * axes.cell() * axes.cell();
    }

    void symmetrize() {
        const int n = axes.per_photon();
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const complexd v = at(i, j) + at(j, i);
                at(i, j) = v;
                at(j, i) = v;
            }
    }

    void normalize() {
        const double nrm = std::sqrt(l2_norm2());
        if (nrm == 0.0) fail("JsaGrid: cannot normalize an all-zero amplitude");
        for (complexd& v : amp) v /= nrm;
    }

    bool is_normalized(double tol = 1e-10) const { return std::abs(l2_norm2() - 1.0) <= tol; }

    double exchange_asymmetry() const {
        const int n = axes.per_photon();
        double num = 0.0, den = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                num += std::norm(at(i, j) - at(j, i));
                den += std::norm(at(i, j));
            }
        return den > 0.0 ? std::sqrt(num / den) : 0.0;
    }

    /// Fraction of squared mass with |w1 + w2 - w_sum| <= width.
    double mass_within_sum_band(double w_sum, double width) const {
        const int n = axes.per_photon();
        double inside = 0.0, total = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double m =
                    axes.node_weight(i) * axes.node_weight(j) * std::norm(at(i, j));
                total += m;
                if (std::abs(axes.omega(i) + axes.omega(j) - w_sum) <= width) inside += m;
            }
        return total > 0.0 ? inside / total : 0.0;
    }
};

/// Detector passband applied per photon before renormalization.
struct FrequencyFilter {
    enum class Shape { hard, gaussian } shape = Shape::hard;
    double center = 0.0;
    double width = 0.0;  // full width (hard) or sigma (gaussian)

    double factor(double w) const {
        if (shape == Shape::hard) return std::abs(w - center) <= 0.5 * width ? 1.0 : 0.0;
        const double u = (w - center) / width;
        return std::exp(-0.5 * u * u);
    }
};

namespace detail {

/// Frequency-dependent vertex weight. The baseline sqrt(w1 w2) uses the
/// window-sharp substitution (w3 - w1)^2 -> w2^2; when the frequency window
/// is wider than 1% of the detected band the exact factor is kept.
inline double vertex_weight(double w1, double w2, double w3, bool use_exact) {
    const double base = std::sqrt(w1 * w2);
    if (!use_exact) return base;
    const double r = (w3 - w1) / w2;
    return base * r * r;
}

/// 20-point Gauss-Hermite rule (weight e^{-x^2}) from the Golub-Welsch
/// recurrence.
struct GaussHermite {
    std::vector<double> x, w;

    GaussHermite() {
        constexpr int n = 20;
        Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
        for (int k = 1; k < n; ++k) {
            const double b = std::sqrt(k / 2.0);
            j(k - 1, k) = b;
            j(k, k - 1) = b;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
        const double mu0 = std::sqrt(pi);  // integral of e^{-x^2}
        for (int k = 0; k < n; ++k) {
            x.push_back(es.eigenvalues()(k));
            w.push_back(mu0 * es.eigenvectors()(0, k) * es.eigenvectors()(0, k));
        }
    }

    static const GaussHermite& get() {
        static GaussHermite rule;
        return rule;
    }
};

/// Integral over w3 of pump_envelope(w3) * time_window(w3 - s) * f(w3).
/// Gaussian pump and gaussian window combine into a single gaussian, so
/// Gauss-Hermite handles any window/pump width ratio; the box window falls
/// back to an adaptive trapezoid over the intersection of supports.
template <class Fn>
complexd pump_frequency_integral(const PumpSpectrum& pump, const CrystalSpec& crystal, double s,
                                 Fn&& f) {
    if (pump.monochromatic())
        return crystal.time_window(pump.omega0 - s) * f(pump.omega0);

    if (crystal.infinite_time()) {
        // pure gaussian envelope
        const auto& gh = GaussHermite::get();
        const double sc = std::sqrt(2.0) * pump.sigma_omega;
        complexd acc{};
        for (std::size_t j = 0; j < gh.x.size(); ++j) {
            const double w3 = pump.omega0 + sc * gh.x[j];
            if (w3 <= 0.0) continue;
            acc += gh.w[j] * f(w3);
        }
        return sc * acc;
    }

    if (crystal.window == CrystalSpec::Window::gaussian) {
        const double sig_win = 2.0 / crystal.interaction_time;  // amplitude width
        const double inv2 = 1.0 / (pump.sigma_omega * pump.sigma_omega) +
                            1.0 / (sig_win * sig_win);
        const double sigc = 1.0 / std::sqrt(inv2);
        const double wc = sigc * sigc *
                          (pump.omega0 / (pump.sigma_omega * pump.sigma_omega) +
                           s / (sig_win * sig_win));
        const double cross = std::exp(-0.5 * std::pow(pump.omega0 - s, 2) /
                                      (pump.sigma_omega * pump.sigma_omega +
                                       sig_win * sig_win));
        const auto& gh = GaussHermite::get();
        const double sc = std::sqrt(2.0) * sigc;
        complexd acc{};
        for (std::size_t j = 0; j < gh.x.size(); ++j) {
            const double w3 = wc + sc * gh.x[j];
            if (w3 <= 0.0) continue;
            acc += gh.w[j] * f(w3);
        }
        return crystal.interaction_time * cross * sc * acc;
    }

    // box window: adaptive trapezoid over the pump support
    const double res = std::min(pump.sigma_omega, 1.0 / crystal.interaction_time) / 8.0;
    const double lo = pump.omega0 - 6.0 * pump.sigma_omega;
    const double hi = pump.omega0 + 6.0 * pump.sigma_omega;
    const int nq = static_cast<int>(std::ceil((hi - lo) / res));
    if (nq > 200000) fail("spdc_jsa: box window too narrow to integrate on this pump support");
    const double h = (hi - lo) / nq;
    complexd acc{};
    for (int j = 0; j <= nq; ++j) {
        const double w3 = lo + j * h;
        if (w3 <= 0.0) continue;
        const double wgt = (j == 0 || j == nq) ? 0.5 : 1.0;
        acc += wgt * h * pump.spectral_envelope(w3) * crystal.time_window(w3 - s) * f(w3);
    }
    return acc;
}

} // namespace detail

/// Optional kernel replacement hook: substitutes the physical kernel
/// (everything except symmetrization and normalization). Used by tests to
/// drive separable amplitudes through the full pipeline.
using JsaKernelOverride = std::function<complexd(double w1, double q1, double w2, double q2)>;

/// Assemble the joint spectral amplitude of the down-converted pair:
/// vertex weight x pump spectrum x finite-time frequency window x
/// transverse aperture window x longitudinal phase matching, symmetrized
/// over photon exchange and normalized to unit L2 norm.
inline JsaGrid spdc_jsa(const PumpSpectrum& pump, const CrystalSpec& crystal,
                        const JsaAxes& axes, const JsaKernelOverride& kernel_override = {}) {
    pump.validate();
    crystal.validate();
    axes.validate();
    if (axes.n_q > 0 && pump.q_dims == 0)
        fail("spdc_jsa: q axis requested for a collinear pump");
    pump.check_paraxial(axes.n_q > 0 ? 2.0 * axes.q_max : 0.0, crystal.n);

    // The frequency grid must resolve the pump bandwidth: at least 4
    // samples across the FWHM of the gaussian envelope.
    if (!pump.monochromatic()) {
        const double fwhm = 2.3548200450309493 * pump.sigma_omega;
        if (axes.d_omega() > fwhm / 4.0)
            fail("spdc_jsa: frequency grid too coarse for the pump bandwidth (need >= 4 "
                 "samples per FWHM)");
    }

    // Substitute (w3 - w1)^2 -> w2^2 only when the frequency window is
    // narrower than 1% of the smallest detected frequency.
    const double window_width = crystal.infinite_time() ? 0.0 : 2.0 / crystal.interaction_time;
    const bool use_exact = window_width > 0.01 * axes.omega_min;

    const int n = axes.per_photon();
    JsaGrid jsa(axes);

    // Transverse handling. The pump's q3 content is a delta for a
    // plane-wave pump and a gaussian of width 2/waist for a beam; a finite
    // aperture relaxes q3 = q1 + q2 to the sinc window. A plane-wave pump
    // through an unbounded aperture would concentrate all mass on
    // q1 + q2 = 0 exactly, which no grid resolves.
    const bool q_resolved = axes.n_q > 0;
    const bool convolve_q = q_resolved && !crystal.infinite_transverse() &&
                            !pump.plane_transverse();
    if (q_resolved && crystal.infinite_transverse() && pump.plane_transverse())
        fail("spdc_jsa: plane-wave pump with an unbounded aperture needs either a finite "
             "transverse_width or a finite waist");

    std::vector<double> q3_nodes, q3_weights;
    if (convolve_q) {
        const double beam_width = 2.0 / pump.waist;  // q-space envelope width
        const double q3_lim = std::min(2.0 * axes.q_max + 10.0 * pi / crystal.transverse_width,
                                       8.0 * beam_width);
        const double res = std::min(pi / crystal.transverse_width / 5.0, beam_width / 8.0);
        const int nq3 = std::min(8001, 2 * static_cast<int>(std::ceil(q3_lim / res)) + 1);
        const double h = 2.0 * q3_lim / (nq3 - 1);
        for (int j = 0; j < nq3; ++j) {
            q3_nodes.push_back(-q3_lim + j * h);
            q3_weights.push_back((j == 0 || j == nq3 - 1) ? 0.5 * h : h);
        }
    }

    parallel_for(n, [&](std::int64_t ii) {
        const int i1 = static_cast<int>(ii);
        const double w1 = axes.omega(i1);
        const double q1 = axes.q(i1);
        const Kz k1z = longitudinal_wavenumber(w1, q1, crystal.n);
        for (int i2 = 0; i2 < n; ++i2) {
            if (kernel_override) {
                jsa.at(i1, i2) = kernel_override(w1, q1, axes.omega(i2), axes.q(i2));
                continue;
            }
            const double w2 = axes.omega(i2);
            const double q2 = axes.q(i2);
            const Kz k2z = longitudinal_wavenumber(w2, q2, crystal.n);
            if (k1z.evanescent || k2z.evanescent) continue;  // zeroed, flagged below

            auto kernel_at = [&](double w3, double q3, double envelope) -> complexd {
                const Kz k3z = longitudinal_wavenumber(w3, q3, crystal.n);
                if (k3z.evanescent) return complexd{};
                const double dkz = k3z.value - k1z.value - k2z.value;
                return detail::vertex_weight(w1, w2, w3, use_exact) * envelope *
                       phase_matching_factor(dkz, crystal.length);
            };

            complexd acc{};
            if (convolve_q) {
                // beam envelope against the aperture window
                for (std::size_t j3 = 0; j3 < q3_nodes.size(); ++j3) {
                    const double q3 = q3_nodes[j3];
                    const double win = crystal.transverse_window(q3 - q1 - q2);
                    const double env = pump.transverse_envelope(q3);
                    if (win == 0.0 || env == 0.0) continue;
                    acc += q3_weights[j3] * win *
                           detail::pump_frequency_integral(
                               pump, crystal, w1 + w2,
                               [&](double w3) { return kernel_at(w3, q3, env); });
                }
            } else if (q_resolved && pump.plane_transverse()) {
                // delta pump: q3 = 0, aperture window carries the spread
                const double win = crystal.transverse_window(-(q1 + q2));
                acc = win * detail::pump_frequency_integral(
                                pump, crystal, w1 + w2,
                                [&](double w3) { return kernel_at(w3, 0.0, 1.0); });
            } else {
                // unbounded aperture: q3 = q1 + q2 exactly
                const double q3 = q1 + q2;
                const double env = q_resolved ? pump.transverse_envelope(q3) : 1.0;
                acc = detail::pump_frequency_integral(
                    pump, crystal, w1 + w2,
                    [&](double w3) { return kernel_at(w3, q3, env); });
            }
            jsa.at(i1, i2) = crystal.chi2 * acc;
        }
    });

    jsa.symmetrize();
    jsa.normalize();
    return jsa;
}

/// Apply per-photon detector passbands and renormalize.
inline JsaGrid apply_filters(const JsaGrid& in, const FrequencyFilter& f1,
                             const FrequencyFilter& f2) {
    JsaGrid out = in;
    const int n = in.axes.per_photon();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.at(i, j) *= f1.factor(in.axes.omega(i)) * f2.factor(in.axes.omega(j));
    out.normalize();
    return out;
}

/// Marginal density of one photon (partial trace of |amp|^2); integrates
/// to one under the per-photon node_weight * cell measure.
inline std::vector<double> marginal_spectrum(const JsaGrid& jsa, int which_photon) {
    if (which_photon != 1 && which_photon != 2) fail("marginal_spectrum: photon must be 1 or 2");
    if (!jsa.is_normalized()) fail("marginal_spectrum: input must be normalized");
    const int n = jsa.axes.per_photon();
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int traced = which_photon == 1 ? j : i;
            const int kept = which_photon == 1 ? i : j;
            out[kept] += jsa.axes.node_weight(traced) * std::norm(jsa.at(i, j)) *
                         jsa.axes.cell();
        }
    return out;
}

/// Band-limited lattice evaluation of the mode-sum commutator kernel
///   Integral d3k (hbar w / (2 n (2 pi)^3)) e^{i (k.dr - w dt)},
/// realized as a midpoint sum over a cubic lattice with the shared
/// apodization of `spec`. Identical (in the continuum) to
/// (-i hbar / 4 c^2) d^2/dt dt' of the d3k/k spectral propagator.
inline complexd commutator_kernel(const Vec3& dr, double dtau, const GreenSpec& spec,
                                  int n_lattice) {
    spec.validate();
    if (n_lattice < 8) fail("commutator_kernel: lattice too small");
    const double dk = 2.0 * spec.k_max / n_lattice;
    const double cell = dk * dk * dk;
    const double prefactor = hbar_internal / (2.0 * spec.n * std::pow(2.0 * pi, 3));

    std::vector<complexd> partial(n_lattice);
    parallel_for(n_lattice, [&](std::int64_t ix) {
        complexd acc{};
        const double kx = -spec.k_max + (ix + 0.5) * dk;
        for (int iy = 0; iy < n_lattice; ++iy) {
            const double ky = -spec.k_max + (iy + 0.5) * dk;
            for (int iz = 0; iz < n_lattice; ++iz) {
                const double kz = -spec.k_max + (iz + 0.5) * dk;
                const double k = std::sqrt(kx * kx + ky * ky + kz * kz);
                const double a = spec.apod(k);
                if (a == 0.0) continue;
                const double w = c_internal * k / spec.n;
                const double phase = kx * dr[0] + ky * dr[1] + kz * dr[2] - w * dtau;
                acc += a * w * std::exp(iunit * phase);
            }
        }
        partial[ix] = acc;
    });
    complexd acc{};
    for (const complexd& p : partial) acc += p;
    return prefactor * cell * acc;
}

/// The identity partner: mixed time derivative of the spectral propagator
/// scaled by -i hbar / (4 c^2).
inline complexd commutator_kernel_via_green(double R, double dtau, const GreenSpec& spec) {
    return -iunit * hbar_internal / (4.0 * c_internal * c_internal) *
           green_spectral_mixed_dtdtp(R, dtau, spec);
}

/// Harmonic factor with exact time derivatives, a cos(w t + phase).
struct HarmonicScalar {
    double amplitude = 1.0;
    double omega = 0.0;
    double phase = 0.0;

    double value(double t) const { return amplitude * std::cos(omega * t + phase); }
    double d1(double t) const { return -amplitude * omega * std::sin(omega * t + phase); }
    double d2(double t) const { return -amplitude * omega * omega * std::cos(omega * t + phase); }
};

/// Nonlinear source term for the ordinary field,
///   f_e_o(r', t') = -mu0 d^2/dt'^2 [ chi2(r') E_o(r', t') E_e(r', t') ],
/// for analytically supplied factors. Outside the crystal support the
/// coupling, and hence the source, is exactly zero.
inline double nonlinear_source(const HarmonicScalar& pump_e, const HarmonicScalar& ordinary,
                               const CrystalSpec& crystal, const Vec3& r_prime, double t_prime) {
    crystal.validate();
    const bool inside_z = std::abs(r_prime[2]) <= 0.5 * crystal.length;
    const bool inside_t = crystal.infinite_transverse() ||
                          (std::abs(r_prime[0]) <= 0.5 * crystal.transverse_width &&
                           std::abs(r_prime[1]) <= 0.5 * crystal.transverse_width);
    if (!inside_z || !inside_t) return 0.0;
    // d^2 (f g) = f'' g + 2 f' g' + f g''
    const double d2fg = pump_e.d2(t_prime) * ordinary.value(t_prime) +
                        2.0 * pump_e.d1(t_prime) * ordinary.d1(t_prime) +
                        pump_e.value(t_prime) * ordinary.d2(t_prime);
    return -mu0_internal * crystal.chi2 * d2fg;
}

/// Position-space biphoton amplitude for narrowband detection at
/// (w1, w2): quadrature over the crystal volume of the two spherical-wave
/// kernels times the pump's windowed transform at the sum frequency,
/// symmetrized over (r1, w1) <-> (r2, w2).
struct BiphotonPositionConfig {
    int nx = 24, ny = 24, nz = 12;    // crystal quadrature counts
    double transverse_width_y = 0.0;  // extent along y (defaults to width)
};

inline bool point_inside_crystal(const CrystalSpec& crystal, const Vec3& r, double wy) {
    const double wx = crystal.infinite_transverse() ? 0.0 : crystal.transverse_width;
    if (wx <= 0.0) return std::abs(r[2]) <= 0.5 * crystal.length;
    return std::abs(r[0]) <= 0.5 * wx && std::abs(r[1]) <= 0.5 * wy &&
           std::abs(r[2]) <= 0.5 * crystal.length;
}

inline complexd biphoton_position(const PumpSpectrum& pump, const CrystalSpec& crystal,
                                  const Vec3& r1, const Vec3& r2, double w1, double w2,
                                  const BiphotonPositionConfig& cfg = {}) {
    pump.validate();
    crystal.validate();
    if (crystal.infinite_transverse())
        fail("biphoton_position: needs a finite transverse crystal");
    const double wy = cfg.transverse_width_y > 0.0 ? cfg.transverse_width_y
                                                   : crystal.transverse_width;
    if (point_inside_crystal(crystal, r1, wy) || point_inside_crystal(crystal, r2, wy))
        fail("biphoton_position: observation point inside the crystal");

    const double w3 = w1 + w2;
    const double pump_amp = pump.monochromatic()
                                ? crystal.time_window(pump.omega0 - w3)
                                : pump.spectral_envelope(w3);
    const double k1 = crystal.n * w1 / c_internal;
    const double k2 = crystal.n * w2 / c_internal;
    const double k3 = crystal.n * w3 / c_internal;

    const double hx = crystal.transverse_width / cfg.nx;
    const double hy = wy / cfg.ny;
    const double hz = crystal.length / cfg.nz;
    const double dv = hx * hy * hz;

    // amplitude for one detector pairing: photon with wavenumber ka reaches
    // ra, the partner with kb reaches rb
    auto one_ordering = [&](const Vec3& ra, const Vec3& rb, double ka, double kb) {
        complexd acc{};
        for (int ix = 0; ix < cfg.nx; ++ix)
            for (int iy = 0; iy < cfg.ny; ++iy)
                for (int iz = 0; iz < cfg.nz; ++iz) {
                    const Vec3 rp = {-0.5 * crystal.transverse_width + (ix + 0.5) * hx,
                                     -0.5 * wy + (iy + 0.5) * hy,
                                     -0.5 * crystal.length + (iz + 0.5) * hz};
                    const double ra_d = norm(Vec3{ra[0] - rp[0], ra[1] - rp[1], ra[2] - rp[2]});
                    const double rb_d = norm(Vec3{rb[0] - rp[0], rb[1] - rp[1], rb[2] - rp[2]});
                    const complexd spherical =
                        std::exp(iunit * (ka * ra_d + kb * rb_d)) / (ra_d * rb_d);
                    const double beam = pump.waist > 0.0
                                            ? std::exp(-(rp[0] * rp[0] + rp[1] * rp[1]) /
                                                       (pump.waist * pump.waist))
                                            : 1.0;
                    acc += spherical * std::exp(iunit * k3 * rp[2]) * beam;
                }
        return acc * dv;
    };

    const complexd direct = one_ordering(r1, r2, k1, k2);
    const complexd swapped = one_ordering(r2, r1, k1, k2);
    return crystal.chi2 * pump_amp * w1 * w1 * w2 * w2 * (direct + swapped);
}

} // namespace pwf
