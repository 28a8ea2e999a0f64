#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "pwf/common.hpp"
#include "pwf/field.hpp"
#include "pwf/helicity.hpp"
#include "pwf/medium.hpp"

namespace pwf {

/// Helicity-resolved photon wave function on the grid.
struct RSState {
    ComplexVectorField psi_plus;
    ComplexVectorField psi_minus;
    double t = 0.0;

    RSState() = default;
    explicit RSState(const Grid3& g, double time = 0.0)
        : psi_plus(g), psi_minus(g), t(time) {}

    const Grid3& grid() const { return psi_plus.grid; }

    ComplexVectorField total() const { return psi_plus + psi_minus; }

    /// sigma acts as +1 on psi_plus and -1 on psi_minus.
    ComplexVectorField sigma_total() const { return psi_plus - psi_minus; }

    double l2_norm2() const { return psi_plus.l2_norm2() + psi_minus.l2_norm2(); }
};

/// Residuals of the state invariants: spectral divergence and helicity
/// purity, both relative to the field RMS.
struct RSStateResiduals {
    double divergence_rel = 0.0;
    double helicity_purity_rel = 0.0;
};

inline RSStateResiduals rs_state_residuals(const RSState& s) {
    RSStateResiduals r;
    const double total = s.psi_plus.l2_norm2() + s.psi_minus.l2_norm2();
    if (total == 0.0) return r;
    const double rms = std::sqrt(total / s.grid().volume());
    const double div = std::hypot(divergence_rms(s.psi_plus), divergence_rms(s.psi_minus));
    r.divergence_rel = div / rms;

    auto proj_p = helicity_project(s.psi_plus);
    auto proj_m = helicity_project(s.psi_minus);
    const double err2 = (proj_p.plus - s.psi_plus).l2_norm2() +
                        (proj_m.minus - s.psi_minus).l2_norm2();
    r.helicity_purity_rel = std::sqrt(err2 / total);
    return r;
}

/// Diagnostics reported by rs_compose.
struct ComposeDiagnostics {
    double longitudinal_energy_fraction = 0.0;
    bool longitudinal_discarded = false;
};

/// Build the helicity-resolved photon wave function from real (E, B).
///
/// E and B are first split into helicity parts; the medium weights are then
/// applied pointwise:
///   psi_s = sqrt(eps/2) E_s + s * i * sqrt(1/(2 mu)) B_s,   s = +/-.
/// For a uniform medium this is equivalent to
///   psi = sqrt(eps/2) E_T + i sqrt(1/(2 mu)) sigma(B),
/// the c-number form of the operator relation between the dressed field and
/// (E, B). Longitudinal and k = 0 content is discarded; a warning is issued
/// if its energy fraction exceeds 1e-10.
inline RSState rs_compose(const RealFieldPair& fields, const MediumMap& medium,
                          ComposeDiagnostics* diag = nullptr) {
    if (fields.grid() != medium.grid()) fail("rs_compose: field/medium grid mismatch");
    if (!fields.finite()) fail("rs_compose: non-finite input fields");

    auto e_split = helicity_project(to_complex(fields.E));
    auto b_split = helicity_project(to_complex(fields.B));

    const double total = fields.E.l2_norm2() + fields.B.l2_norm2();
    const double longi = e_split.longitudinal.l2_norm2() + b_split.longitudinal.l2_norm2();
    const double frac = total > 0.0 ? longi / total : 0.0;
    if (diag) {
        diag->longitudinal_energy_fraction = frac;
        diag->longitudinal_discarded = frac > 1e-10;
    }
    if (frac > 1e-10)
        warn("rs_compose: discarding longitudinal content, energy fraction " +
             std::to_string(frac));

    RSState out(fields.grid(), fields.t);
    const std::int64_t n = fields.grid().size();
    for (std::int64_t i = 0; i < n; ++i) {
        const double we = std::sqrt(medium.eps(i) / 2.0);
        const double wb = std::sqrt(1.0 / (2.0 * medium.mu(i)));
        for (int c = 0; c < 3; ++c) {
            out.psi_plus.comp[c][i] =
                we * e_split.plus.comp[c][i] + iunit * wb * b_split.plus.comp[c][i];
            out.psi_minus.comp[c][i] =
                we * e_split.minus.comp[c][i] - iunit * wb * b_split.minus.comp[c][i];
        }
    }
    return out;
}

inline RSState rs_compose_vacuum(const RealFieldPair& fields, ComposeDiagnostics* diag = nullptr) {
    return rs_compose(fields, MediumMap::vacuum(fields.grid()), diag);
}

/// Invert the composition:
///   E = (psi + conj(psi)) / sqrt(2 eps),
///   B = -i sqrt(mu/2) [ sigma(psi) - conj(sigma(psi)) ].
/// Pointwise in the medium weights; no transform is needed because the
/// helicity split already diagonalizes sigma.
inline RealFieldPair rs_decompose(const RSState& state, const MediumMap& medium) {
    if (state.grid() != medium.grid()) fail("rs_decompose: state/medium grid mismatch");
    RealFieldPair out(state.grid(), state.t);
    const std::int64_t n = state.grid().size();
    for (std::int64_t i = 0; i < n; ++i) {
        const double ie = std::sqrt(2.0 / medium.eps(i));
        const double ib = std::sqrt(2.0 * medium.mu(i));
        for (int c = 0; c < 3; ++c) {
            const complexd psi = state.psi_plus.comp[c][i] + state.psi_minus.comp[c][i];
            const complexd sig = state.psi_plus.comp[c][i] - state.psi_minus.comp[c][i];
            out.E.comp[c][i] = ie * psi.real();
            out.B.comp[c][i] = ib * sig.imag();
        }
    }
    return out;
}

inline RealFieldPair rs_decompose_vacuum(const RSState& state) {
    return rs_decompose(state, MediumMap::vacuum(state.grid()));
}

/// Pointwise |psi_plus + psi_minus|^2. The modulus squared carries units of
/// energy density; its integral is the photon energy expectation.
inline RealScalarField energy_density(const RSState& state) {
    RealScalarField out(state.grid());
    const std::int64_t n = state.grid().size();
    for (std::int64_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int c = 0; c < 3; ++c)
            acc += std::norm(state.psi_plus.comp[c][i] + state.psi_minus.comp[c][i]);
        out.values[i] = acc;
    }
    return out;
}

/// Helicity-resolved density |psi_plus|^2 + |psi_minus|^2. Differs from
/// energy_density pointwise by the inter-helicity cross term, which
/// vanishes under the integral.
inline RealScalarField energy_density_by_helicity(const RSState& state) {
    RealScalarField out(state.grid());
    const std::int64_t n = state.grid().size();
    for (std::int64_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int c = 0; c < 3; ++c)
            acc += std::norm(state.psi_plus.comp[c][i]) + std::norm(state.psi_minus.comp[c][i]);
        out.values[i] = acc;
    }
    return out;
}

/// Electromagnetic energy density expression eps0|E|^2/2 + |B|^2/(2 mu0)
/// on instantaneous real fields.
inline RealScalarField em_energy_density(const RealFieldPair& fields) {
    RealScalarField out(fields.grid());
    const std::int64_t n = fields.grid().size();
    for (std::int64_t i = 0; i < n; ++i) {
        const Vec3 e = fields.E.at(i), b = fields.B.at(i);
        out.values[i] = 0.5 * eps0_internal * dot(e, e) + dot(b, b) / (2.0 * mu0_internal);
    }
    return out;
}

/// Cycle-averaged material energy density acquired by the medium:
///   u_mat = chi_e eps0 |E|^2 / 4 + chi_m |B|^2 / [4 (1+chi_m) mu0].
inline RealScalarField material_energy_density(const RealFieldPair& fields,
                                               const MediumMap& medium) {
    if (fields.grid() != medium.grid())
        fail("material_energy_density: field/medium grid mismatch");
    RealScalarField out(fields.grid());
    const std::int64_t n = fields.grid().size();
    for (std::int64_t i = 0; i < n; ++i) {
        const Vec3 e = fields.E.at(i), b = fields.B.at(i);
        const double ce = medium.chi_e().values[i];
        const double cm = medium.chi_m().values[i];
        out.values[i] = 0.25 * ce * eps0_internal * dot(e, e) +
                        0.25 * cm * dot(b, b) / ((1.0 + cm) * mu0_internal);
    }
    return out;
}

/// Energy current density S = Re[-i c conj(psi) x sigma(psi)]. Its cycle
/// average reproduces <E x B>/mu0 on monochromatic states.
inline RealVectorField poynting_current(const RSState& state) {
    RealVectorField out(state.grid());
    const std::int64_t n = state.grid().size();
    for (std::int64_t i = 0; i < n; ++i) {
        CVec3 psi, sig;
        for (int c = 0; c < 3; ++c) {
            psi[c] = state.psi_plus.comp[c][i] + state.psi_minus.comp[c][i];
            sig[c] = state.psi_plus.comp[c][i] - state.psi_minus.comp[c][i];
        }
        const CVec3 conj_psi = {std::conj(psi[0]), std::conj(psi[1]), std::conj(psi[2])};
        const CVec3 s = cross(conj_psi, sig);
        out.comp[0][i] = (-iunit * c_internal * s[0]).real();
        out.comp[1][i] = (-iunit * c_internal * s[1]).real();
        out.comp[2][i] = (-iunit * c_internal * s[2]).real();
    }
    return out;
}

/// Quadrature partner of a state: every mode phase-advanced by pi/2
/// (psi -> -i psi). Used to realize exact cycle averages of quadratic
/// field expressions on positive-frequency states.
inline RSState quadrature_state(const RSState& state) {
    RSState out = state;
    out.psi_plus *= -iunit;
    out.psi_minus *= -iunit;
    return out;
}

} // namespace pwf
