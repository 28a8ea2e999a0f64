#pragma once

#include <cmath>
#include <vector>

#include "pwf/common.hpp"
#include "pwf/fft.hpp"
#include "pwf/helicity.hpp"
#include "pwf/medium.hpp"
#include "pwf/rs.hpp"

namespace pwf {

/// Helicity-tagged amplitudes on the dual wavevector lattice of a grid,
/// relative to a uniform background medium. Entries are continuum-density
/// samples: weights integrate as sum * k_cell_volume. The same container
/// backs mode amplitudes a_{ks} and one-photon spectra.
struct SpectralAmplitudes {
    Grid3 grid;                    // position grid whose dual lattice is used
    double chi_e = 0.0, chi_m = 0.0;  // uniform quantization background
    std::vector<complexd> plus, minus;

    SpectralAmplitudes() = default;
    explicit SpectralAmplitudes(const Grid3& g, double ce = 0.0, double cm = 0.0)
        : grid(g), chi_e(ce), chi_m(cm), plus(g.size()), minus(g.size()) {}

    double refractive_index() const { return std::sqrt((1.0 + chi_e) * (1.0 + chi_m)); }
    double omega(const Vec3& k) const { return c_internal * norm(k) / refractive_index(); }

    /// Total weight sum_s integral d3k |a|^2 (lattice sum times cell volume).
    double total_weight() const {
        double s = 0.0;
        for (const complexd& v : plus) s += std::norm(v);
        for (const complexd& v : minus) s += std::norm(v);
        return s * grid.k_cell_volume();
    }

    void normalize() {
        const double w = total_weight();
        if (w == 0.0) fail("SpectralAmplitudes: cannot normalize zero weight");
        const double s = 1.0 / std::sqrt(w);
        for (auto& v : plus) v *= s;
        for (auto& v : minus) v *= s;
    }

    bool is_normalized(double tol = 1e-10) const {
        return std::abs(total_weight() - 1.0) <= tol;
    }
};

using ModeAmplitudes = SpectralAmplitudes;
using OnePhotonSpectral = SpectralAmplitudes;

namespace detail {

/// Conversion factor between a lattice mode coefficient (field = sum of
/// coeff * e^{ikr}) and the continuum-density amplitude of the energy
/// eigenmode expansion: coeff = kcell * sqrt(hbar w / (2 pi)^3) * a.
inline double mode_coefficient_scale(const Grid3& g, double omega) {
    const double kcell = g.k_cell_volume();
    return kcell * std::sqrt(hbar_internal * omega / std::pow(2.0 * pi, 3));
}

} // namespace detail

/// Invert the plane-wave expansion of a dressed transverse state in a
/// uniform medium: a_{ks} = <mode|psi> / sqrt(hbar w). The k = 0 cell must
/// carry no amplitude (its mode energy vanishes).
inline ModeAmplitudes decompose(const RSState& state, const MediumMap& medium) {
    if (!medium.is_uniform()) fail("decompose: medium must be uniform");
    if (state.grid() != medium.grid()) fail("decompose: grid mismatch");

    ModeAmplitudes out(state.grid(), medium.uniform_chi_e(), medium.uniform_chi_m());

    ComplexVectorField sp = state.psi_plus, sm = state.psi_minus;
    fft_forward(sp);
    fft_forward(sm);

    const double state_scale = std::sqrt(state.psi_plus.l2_norm2() + state.psi_minus.l2_norm2());
    detail::for_each_mode(state.grid(), [&](std::int64_t i, const Vec3& k) {
        const CVec3 vp = detail::spectral_at(sp, i);
        const CVec3 vm = detail::spectral_at(sm, i);
        if (k[0] == 0.0 && k[1] == 0.0 && k[2] == 0.0) {
            const double amp = std::sqrt(norm2(vp) + norm2(vm));
            if (state_scale > 0.0 && amp > 1e-12 * state_scale)
                fail("decompose: k = 0 carries amplitude but has no mode energy");
            return;
        }
        const HelicityBasis b = helicity_basis(k);
        const double scale = detail::mode_coefficient_scale(state.grid(), out.omega(k));
        const complexd rot = std::exp(iunit * out.omega(k) * state.t);
        out.plus[i] = cdot(b.e_plus(), vp) * rot / scale;
        out.minus[i] = cdot(b.e_minus(), vm) * rot / scale;
    });
    return out;
}

/// Oscillator-sum energy H = sum_s integral d3k hbar w |a_{ks}|^2.
inline double total_energy(const ModeAmplitudes& modes) {
    double s = 0.0;
    detail::for_each_mode(modes.grid, [&](std::int64_t i, const Vec3& k) {
        const double w = modes.omega(k);
        s += hbar_internal * w * (std::norm(modes.plus[i]) + std::norm(modes.minus[i]));
    });
    return s * modes.grid.k_cell_volume();
}

/// Build the position-space wave function of a one-photon spectrum at time
/// t (mode sum with e^{i(k.r - w t)} phases).
inline RSState synthesize_one_photon(const OnePhotonSpectral& spec, double t) {
    RSState out(spec.grid, t);
    ComplexVectorField sp(spec.grid), sm(spec.grid);
    detail::for_each_mode(spec.grid, [&](std::int64_t i, const Vec3& k) {
        if (k[0] == 0.0 && k[1] == 0.0 && k[2] == 0.0) return;
        const HelicityBasis b = helicity_basis(k);
        const double w = spec.omega(k);
        const complexd coeff = detail::mode_coefficient_scale(spec.grid, w) *
                               std::exp(-iunit * w * t);
        const CVec3 ep = b.e_plus(), em = b.e_minus();
        const complexd cp = coeff * spec.plus[i], cm = coeff * spec.minus[i];
        sp.set(i, {cp * ep[0], cp * ep[1], cp * ep[2]});
        sm.set(i, {cm * em[0], cm * em[1], cm * em[2]});
    });
    fft_inverse(sp);
    fft_inverse(sm);
    out.psi_plus = std::move(sp);
    out.psi_minus = std::move(sm);
    return out;
}

/// Mode sum evaluated at an arbitrary point (on or off the grid).
inline CVec3 eval_one_photon(const OnePhotonSpectral& spec, const Vec3& r, double t) {
    CVec3 acc{};
    detail::for_each_mode(spec.grid, [&](std::int64_t i, const Vec3& k) {
        if (k[0] == 0.0 && k[1] == 0.0 && k[2] == 0.0) return;
        const complexd ap = spec.plus[i], am = spec.minus[i];
        if (ap == complexd{} && am == complexd{}) return;
        const HelicityBasis b = helicity_basis(k);
        const double w = spec.omega(k);
        const complexd phase = std::exp(iunit * (dot(k, r) - w * t));
        const complexd coeff = detail::mode_coefficient_scale(spec.grid, w) * phase;
        const CVec3 ep = b.e_plus(), em = b.e_minus();
        for (int c = 0; c < 3; ++c) acc[c] += coeff * (ap * ep[c] + am * em[c]);
    });
    return acc;
}

/// Two-photon spectrum in factored form: sum of rank-1 terms
/// coeff * f(k,s) (x) g(k',s'). The manifest form for dense storage is a
/// special case with one term per basis row; factored storage keeps the
/// k x k' product tractable.
struct TwoPhotonSpectral {
    struct Term {
        complexd coeff{1.0, 0.0};
        OnePhotonSpectral f;
        OnePhotonSpectral g;
    };
    std::vector<Term> terms;

    const Grid3& grid() const {
        if (terms.empty()) fail("TwoPhotonSpectral: empty");
        return terms.front().f.grid;
    }
};

/// Complex 3x3 polarization tensor amplitude.
using Tensor3c = std::array<std::array<complexd, 3>, 3>;

/// Evaluate the symmetrized two-photon wave function at (r1, r2, t):
///   sum_m c_m [ F_m(r1) (x) G_m(r2) + G_m(r1) (x) F_m(r2) ],
/// which realizes the kernel [psi(k,k') + psi(k',k)] of the mode-product
/// expansion. Exchange of (r1, index1) <-> (r2, index2) is a symmetry by
/// construction.
inline Tensor3c synthesize_two_photon(const TwoPhotonSpectral& spec, const Vec3& r1,
                                      const Vec3& r2, double t) {
    Tensor3c out{};
    for (const auto& term : spec.terms) {
        const CVec3 f1 = eval_one_photon(term.f, r1, t);
        const CVec3 g2 = eval_one_photon(term.g, r2, t);
        const CVec3 g1 = eval_one_photon(term.g, r1, t);
        const CVec3 f2 = eval_one_photon(term.f, r2, t);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                out[a][b] += term.coeff * (f1[a] * g2[b] + g1[a] * f2[b]);
    }
    return out;
}

} // namespace pwf
