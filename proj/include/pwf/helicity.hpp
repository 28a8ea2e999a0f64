#pragma once

#include <cmath>
#include <string>

#include "pwf/common.hpp"
#include "pwf/fft.hpp"
#include "pwf/field.hpp"

namespace pwf {

/// Orthonormal polarization triad for one wavevector. The circular vectors
/// e_plus/e_minus satisfy i khat x e_s = s e_s, i.e. they are helicity
/// eigenvectors. The basis is fixed deterministically: e1 = zhat x khat
/// normalized, with e1 = xhat as the fallback when k is (anti)parallel to
/// zhat; e2 = khat x e1. For k = +zhat this reproduces
/// e_plus = (xhat + i yhat)/sqrt(2).
struct HelicityBasis {
    Vec3 khat{0, 0, 1};
    Vec3 e1{1, 0, 0};
    Vec3 e2{0, 1, 0};

    CVec3 e_plus() const {
        constexpr double inv_sqrt2 = 0.70710678118654752440;
        return {complexd(e1[0], e2[0]) * inv_sqrt2, complexd(e1[1], e2[1]) * inv_sqrt2,
                complexd(e1[2], e2[2]) * inv_sqrt2};
    }
    CVec3 e_minus() const {
        constexpr double inv_sqrt2 = 0.70710678118654752440;
        return {complexd(e1[0], -e2[0]) * inv_sqrt2, complexd(e1[1], -e2[1]) * inv_sqrt2,
                complexd(e1[2], -e2[2]) * inv_sqrt2};
    }
};

inline HelicityBasis helicity_basis(const Vec3& k) {
    const double kn = norm(k);
    if (kn == 0.0) fail("helicity_basis: k = 0 has no transverse basis");
    HelicityBasis b;
    b.khat = {k[0] / kn, k[1] / kn, k[2] / kn};
    Vec3 e1 = cross(Vec3{0, 0, 1}, b.khat);
    const double e1n = norm(e1);
    if (e1n < 1e-12) {
        b.e1 = {1, 0, 0};  // fallback axis for k parallel to zhat
    } else {
        b.e1 = {e1[0] / e1n, e1[1] / e1n, e1[2] / e1n};
    }
    b.e2 = cross(b.khat, b.e1);
    return b;
}

/// Result of splitting a field into helicity eigenparts plus the
/// longitudinal remainder (which also absorbs the k = 0 component).
struct HelicitySplit {
    ComplexVectorField plus;
    ComplexVectorField minus;
    ComplexVectorField longitudinal;
};

namespace detail {

inline CVec3 spectral_at(const ComplexVectorField& f, std::int64_t i) {
    return {f.comp[0][i], f.comp[1][i], f.comp[2][i]};
}

template <class Fn>
void for_each_mode(const Grid3& g, Fn&& fn) {
    std::int64_t i = 0;
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy)
            for (int iz = 0; iz < g.nz; ++iz, ++i) fn(i, g.kvec(ix, iy, iz));
}

} // namespace detail

/// Split F into (+ helicity, - helicity, longitudinal) parts. The three
/// outputs sum to F exactly (up to rounding) and the first two are
/// transverse helicity eigenfields. Rejects non-finite input, naming the
/// first offending sample.
inline HelicitySplit helicity_project(const ComplexVectorField& f) {
    const std::int64_t bad = f.first_non_finite();
    if (bad >= 0) {
        const std::int64_t n = f.grid.size();
        fail("helicity_project: non-finite input at component " + std::to_string(bad / n) +
             ", flat index " + std::to_string(bad % n));
    }

    ComplexVectorField spec = f;
    fft_forward(spec);

    HelicitySplit out{ComplexVectorField(f.grid), ComplexVectorField(f.grid),
                      ComplexVectorField(f.grid)};

    detail::for_each_mode(f.grid, [&](std::int64_t i, const Vec3& k) {
        const CVec3 v = detail::spectral_at(spec, i);
        if (k[0] == 0.0 && k[1] == 0.0 && k[2] == 0.0) {
            out.longitudinal.set(i, v);
            return;
        }
        const HelicityBasis b = helicity_basis(k);
        const CVec3 ep = b.e_plus(), em = b.e_minus();
        const complexd ap = cdot(ep, v);
        const complexd am = cdot(em, v);
        const complexd al = v[0] * b.khat[0] + v[1] * b.khat[1] + v[2] * b.khat[2];
        out.plus.set(i, {ap * ep[0], ap * ep[1], ap * ep[2]});
        out.minus.set(i, {am * em[0], am * em[1], am * em[2]});
        out.longitudinal.set(i, {al * b.khat[0], al * b.khat[1], al * b.khat[2]});
    });

    fft_inverse(out.plus);
    fft_inverse(out.minus);
    fft_inverse(out.longitudinal);
    return out;
}

/// Apply the helicity operator: multiplication by i khat x (.) in Fourier
/// space. The k = 0 component is mapped to zero (it carries no helicity).
inline ComplexVectorField sigma_apply(const ComplexVectorField& f) {
    ComplexVectorField spec = f;
    fft_forward(spec);
    detail::for_each_mode(f.grid, [&](std::int64_t i, const Vec3& k) {
        const double kn = norm(k);
        if (kn == 0.0) {
            spec.set(i, {complexd{}, complexd{}, complexd{}});
            return;
        }
        const CVec3 v = detail::spectral_at(spec, i);
        const CVec3 kxv = {complexd(k[1] / kn) * v[2] - complexd(k[2] / kn) * v[1],
                           complexd(k[2] / kn) * v[0] - complexd(k[0] / kn) * v[2],
                           complexd(k[0] / kn) * v[1] - complexd(k[1] / kn) * v[0]};
        spec.set(i, {iunit * kxv[0], iunit * kxv[1], iunit * kxv[2]});
    });
    fft_inverse(spec);
    return spec;
}

/// Spectral divergence of a complex vector field.
inline std::vector<complexd> divergence_spectrum(const ComplexVectorField& f) {
    ComplexVectorField spec = f;
    fft_forward(spec);
    std::vector<complexd> div(f.grid.size());
    detail::for_each_mode(f.grid, [&](std::int64_t i, const Vec3& k) {
        div[i] = iunit * (k[0] * spec.comp[0][i] + k[1] * spec.comp[1][i] + k[2] * spec.comp[2][i]);
    });
    return div;
}

/// RMS of the spectral divergence, in physical (position-space) measure.
inline double divergence_rms(const ComplexVectorField& f) {
    auto div = divergence_spectrum(f);
    double s = 0.0;
    for (const complexd& v : div) s += std::norm(v);
    // Parseval: sum over modes of |div_k|^2 equals the spatial mean square.
    return std::sqrt(s);
}

inline double divergence_rms(const RealVectorField& f) { return divergence_rms(to_complex(f)); }

/// Spectral curl, returned in position space.
inline ComplexVectorField curl(const ComplexVectorField& f) {
    ComplexVectorField spec = f;
    fft_forward(spec);
    detail::for_each_mode(f.grid, [&](std::int64_t i, const Vec3& k) {
        const CVec3 v = detail::spectral_at(spec, i);
        spec.set(i, {iunit * (k[1] * v[2] - k[2] * v[1]), iunit * (k[2] * v[0] - k[0] * v[2]),
                     iunit * (k[0] * v[1] - k[1] * v[0])});
    });
    fft_inverse(spec);
    return spec;
}

inline RealVectorField curl(const RealVectorField& f) { return real_part(curl(to_complex(f))); }

/// Spectral gradient of the divergence, grad(div F), in position space.
inline ComplexVectorField grad_div(const ComplexVectorField& f) {
    ComplexVectorField spec = f;
    fft_forward(spec);
    detail::for_each_mode(f.grid, [&](std::int64_t i, const Vec3& k) {
        const CVec3 v = detail::spectral_at(spec, i);
        const complexd d = k[0] * v[0] + k[1] * v[1] + k[2] * v[2];
        // i k (i k . v) = -k (k . v)
        spec.set(i, {-k[0] * d, -k[1] * d, -k[2] * d});
    });
    fft_inverse(spec);
    return spec;
}

inline RealVectorField grad_div(const RealVectorField& f) {
    return real_part(grad_div(to_complex(f)));
}

} // namespace pwf
