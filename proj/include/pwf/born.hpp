#pragma once

#include <cmath>
#include <vector>

#include "pwf/common.hpp"
#include "pwf/green.hpp"
#include "pwf/grid.hpp"
#include "pwf/helicity.hpp"

namespace pwf {

/// Compactly supported dielectric perturbation relative to the quantization
/// background: a sum of smooth bumps
///   delta_chi_e(r) = amplitude * (1 - (|r-c|/a)^2)^3   for |r-c| < a.
/// The profile is C^2 at the edge, so midpoint quadrature over its support
/// converges fast and the integrated strength has a closed form.
struct PerturbationSpec {
    struct Bump {
        Vec3 center{0, 0, 0};
        double radius = 1.0;
        double amplitude = 0.0;  // peak delta_chi_e
    };
    std::vector<Bump> bumps;
    double quad_spacing = 0.0;  // quadrature lattice spacing (<= radius/4)

    void validate() const {
        if (bumps.empty()) fail("PerturbationSpec: no bumps");
        for (const auto& b : bumps)
            if (!(b.radius > 0.0)) fail("PerturbationSpec: bump radius must be > 0");
        if (!(quad_spacing > 0.0)) fail("PerturbationSpec: quadrature spacing must be > 0");
        for (const auto& b : bumps)
            if (quad_spacing > b.radius / 2.0)
                fail("PerturbationSpec: quadrature spacing too coarse for bump radius");
    }

    double delta_chi_e(const Vec3& r) const {
        double v = 0.0;
        for (const auto& b : bumps) {
            const Vec3 d = {r[0] - b.center[0], r[1] - b.center[1], r[2] - b.center[2]};
            const double u2 = dot(d, d) / (b.radius * b.radius);
            if (u2 < 1.0) {
                const double w = 1.0 - u2;
                v += b.amplitude * w * w * w;
            }
        }
        return v;
    }

    /// integral of delta_chi_e over space: 4 pi a^3 amplitude * 16/315 per bump.
    double integrated_strength() const {
        double s = 0.0;
        for (const auto& b : bumps)
            s += b.amplitude * 4.0 * pi * std::pow(b.radius, 3) * (16.0 / 315.0);
        return s;
    }

    struct QuadPoint {
        Vec3 r;
        double chi;     // delta_chi_e at r
        double volume;  // quadrature weight
    };

    std::vector<QuadPoint> quadrature() const {
        validate();
        std::vector<QuadPoint> pts;
        const double h = quad_spacing;
        for (const auto& b : bumps) {
            const int m = static_cast<int>(std::ceil(b.radius / h));
            for (int ix = -m; ix <= m; ++ix)
                for (int iy = -m; iy <= m; ++iy)
                    for (int iz = -m; iz <= m; ++iz) {
                        const Vec3 r = {b.center[0] + ix * h, b.center[1] + iy * h,
                                        b.center[2] + iz * h};
                        // evaluate the single-bump profile to keep points
                        // attached to their own bump
                        const Vec3 d = {r[0] - b.center[0], r[1] - b.center[1],
                                        r[2] - b.center[2]};
                        const double u2 = dot(d, d) / (b.radius * b.radius);
                        if (u2 >= 1.0) continue;
                        const double w = 1.0 - u2;
                        pts.push_back({r, b.amplitude * w * w * w, h * h * h});
                    }
        }
        return pts;
    }
};

/// Monochromatic transverse plane wave in the uniform background, phasor
/// convention E(r,t) = Re[ E0 pol e^{i(k.r - w t)} ].
struct PlaneWaveIncident {
    Vec3 k{0, 0, 1};     // wavevector (|k| = n w / c)
    CVec3 polarization{complexd(1, 0), complexd(0, 0), complexd(0, 0)};
    double amplitude = 1.0;
    double n_bg = 1.0;

    double omega() const { return c_internal * norm(k) / n_bg; }

    CVec3 phasor(const Vec3& r) const {
        const complexd ph = amplitude * std::exp(iunit * dot(k, r));
        return {polarization[0] * ph, polarization[1] * ph, polarization[2] * ph};
    }

    /// Real field at (r, t).
    Vec3 field(const Vec3& r, double t) const {
        const complexd ph = std::exp(-iunit * omega() * t);
        const CVec3 p = phasor(r);
        return {(p[0] * ph).real(), (p[1] * ph).real(), (p[2] * ph).real()};
    }
};

/// Wave-equation source for the electric field,
///   f_e = -mu0 dJ'/dt - grad(div E),
/// with the first-order (Born) perturbation current J' = d(delta_chi_e
/// eps0 E_in)/dt evaluated on the incident field. Monochromatic phasor
/// form: f_e = mu0 eps0 w^2 delta_chi_e E_in (the grad-div term vanishes
/// for transverse incidents and is reported separately for sampled data).
inline CVec3 source_term_e(const PlaneWaveIncident& inc, const PerturbationSpec& pert,
                           const Vec3& r) {
    const double chi = pert.delta_chi_e(r);
    if (chi == 0.0) return CVec3{};
    const double w = inc.omega();
    const double scale = mu0_internal * eps0_internal * w * w * chi;
    CVec3 e = inc.phasor(r);
    for (auto& c : e) c *= scale;
    return e;
}

/// Sampled-history variant: centered second differences in time plus the
/// spectral grad(div E) term. `fields` must hold at least three uniformly
/// spaced snapshots bracketing the requested index.
struct SampledSourceTerm {
    std::vector<RealVectorField> f_e;  // one per interior snapshot
    std::vector<double> times;
};

inline SampledSourceTerm source_term_e(const std::vector<RealFieldPair>& fields,
                                       const PerturbationSpec& pert, double dt) {
    if (fields.size() < 3) fail("source_term_e: need at least 3 time samples");
    if (!(dt > 0.0)) fail("source_term_e: dt must be > 0");
    SampledSourceTerm out;
    const Grid3& g = fields.front().grid();
    for (std::size_t j = 1; j + 1 < fields.size(); ++j) {
        // J' = delta_chi_e eps0 dE/dt; f_e = -mu0 dJ'/dt - grad(div E)
        RealVectorField fe(g);
        RealVectorField gd = grad_div(fields[j].E);
        for (int ix = 0; ix < g.nx; ++ix)
            for (int iy = 0; iy < g.ny; ++iy)
                for (int iz = 0; iz < g.nz; ++iz) {
                    const std::int64_t i = g.index(ix, iy, iz);
                    const Vec3 r = {g.x(ix), g.y(iy), g.z(iz)};
                    const double chi = pert.delta_chi_e(r);
                    for (int c = 0; c < 3; ++c) {
                        const double d2 = (fields[j + 1].E.comp[c][i] -
                                           2.0 * fields[j].E.comp[c][i] +
                                           fields[j - 1].E.comp[c][i]) /
                                          (dt * dt);
                        fe.comp[c][i] = -mu0_internal * eps0_internal * chi * d2 -
                                        gd.comp[c][i];
                    }
                }
        out.f_e.push_back(std::move(fe));
        out.times.push_back(fields[j].t);
    }
    return out;
}

/// Result of a first-order scattering evaluation at one observation point.
struct BornSample {
    CVec3 incident{};
    CVec3 scattered{};
    bool inside_source = false;  // observation within r_min of the support

    CVec3 total() const {
        return {incident[0] + scattered[0], incident[1] + scattered[1],
                incident[2] + scattered[2]};
    }
};

/// First Born approximation for a monochromatic incident wave: the
/// scattered phasor is the retarded volume integral
///   E_sc(r) = Integral d3r' f_e(r') e^{i k_bg |r-r'|} / (4 pi |r-r'|),
/// with k_bg = n w / c the background wavenumber.
inline std::vector<BornSample> born_scatter(const PlaneWaveIncident& inc,
                                            const PerturbationSpec& pert, const GreenSpec& spec,
                                            const std::vector<Vec3>& observations) {
    spec.validate();
    if (spec.n != inc.n_bg) fail("born_scatter: incident and Green background indices differ");
    const auto quad = pert.quadrature();
    const double k_bg = spec.n * inc.omega() / c_internal;

    std::vector<BornSample> out(observations.size());
    parallel_for(static_cast<std::int64_t>(observations.size()), [&](std::int64_t oi) {
        const Vec3& robs = observations[oi];
        BornSample s;
        s.incident = inc.phasor(robs);
        const double w = inc.omega();
        const double src_scale = mu0_internal * eps0_internal * w * w;
        for (const auto& q : quad) {
            const Vec3 d = {robs[0] - q.r[0], robs[1] - q.r[1], robs[2] - q.r[2]};
            double R = norm(d);
            if (R < spec.r_min) {
                R = spec.r_min;
                s.inside_source = true;
            }
            const complexd kernel =
                std::exp(iunit * k_bg * R) / (4.0 * pi * R) * q.volume * src_scale * q.chi;
            const CVec3 e_in = inc.phasor(q.r);
            for (int c = 0; c < 3; ++c) s.scattered[c] += kernel * e_in[c];
        }
        out[oi] = s;
    });
    return out;
}

/// Far-field observation ring in the plane spanned by (axis1, axis2).
inline std::vector<Vec3> observation_ring(double radius, int count, const Vec3& axis1,
                                          const Vec3& axis2) {
    std::vector<Vec3> pts;
    for (int i = 0; i < count; ++i) {
        const double th = 2.0 * pi * i / count;
        pts.push_back({radius * (std::cos(th) * axis1[0] + std::sin(th) * axis2[0]),
                       radius * (std::cos(th) * axis1[1] + std::sin(th) * axis2[1]),
                       radius * (std::cos(th) * axis1[2] + std::sin(th) * axis2[2])});
    }
    return pts;
}

} // namespace pwf
