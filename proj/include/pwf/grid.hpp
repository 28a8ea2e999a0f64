#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "pwf/common.hpp"

namespace pwf {

/// Periodic rectangular grid. Storage is row-major with z fastest:
/// index = (ix*ny + iy)*nz + iz. The wavevector lattice is the exact
/// discrete Fourier dual, k = 2*pi*m/L with m in FFT frequency order.
struct Grid3 {
    int nx = 0, ny = 0, nz = 0;
    double Lx = 0.0, Ly = 0.0, Lz = 0.0;

    Grid3() = default;
    Grid3(int nx_, int ny_, int nz_, double Lx_, double Ly_, double Lz_)
        : nx(nx_), ny(ny_), nz(nz_), Lx(Lx_), Ly(Ly_), Lz(Lz_) {
        if (nx < 2 || ny < 2 || nz < 2) fail("Grid3: point counts must be >= 2");
        if (!(Lx > 0.0 && Ly > 0.0 && Lz > 0.0)) fail("Grid3: domain lengths must be > 0");
    }

    std::int64_t size() const { return std::int64_t(nx) * ny * nz; }
    double dx() const { return Lx / nx; }
    double dy() const { return Ly / ny; }
    double dz() const { return Lz / nz; }
    double cell_volume() const { return dx() * dy() * dz(); }
    double volume() const { return Lx * Ly * Lz; }

    std::int64_t index(int ix, int iy, int iz) const {
        return (std::int64_t(ix) * ny + iy) * nz + iz;
    }

    double x(int ix) const { return ix * dx(); }
    double y(int iy) const { return iy * dy(); }
    double z(int iz) const { return iz * dz(); }

    // FFT frequency order: 0, 1, ..., n/2, -(n/2-1), ..., -1 times 2*pi/L.
    static int fft_mode(int i, int n) { return (i <= n / 2) ? i : i - n; }
    double kx(int ix) const { return 2.0 * pi * fft_mode(ix, nx) / Lx; }
    double ky(int iy) const { return 2.0 * pi * fft_mode(iy, ny) / Ly; }
    double kz(int iz) const { return 2.0 * pi * fft_mode(iz, nz) / Lz; }

    std::array<double, 3> kvec(int ix, int iy, int iz) const {
        return {kx(ix), ky(iy), kz(iz)};
    }

    /// Volume of one cell of the dual wavevector lattice.
    double k_cell_volume() const {
        return (2.0 * pi / Lx) * (2.0 * pi / Ly) * (2.0 * pi / Lz);
    }

    bool operator==(const Grid3& o) const {
        return nx == o.nx && ny == o.ny && nz == o.nz && Lx == o.Lx && Ly == o.Ly && Lz == o.Lz;
    }
    bool operator!=(const Grid3& o) const { return !(*this == o); }
};

/// Small fixed-size 3-vector helpers used throughout the field kernels.
using Vec3 = std::array<double, 3>;
using CVec3 = std::array<complexd, 3>;

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline CVec3 cross(const CVec3& a, const CVec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Conjugate-linear inner product <a|b> = sum conj(a_i) b_i.
inline complexd cdot(const CVec3& a, const CVec3& b) {
    return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1] + std::conj(a[2]) * b[2];
}
inline double norm2(const CVec3& a) {
    return std::norm(a[0]) + std::norm(a[1]) + std::norm(a[2]);
}

} // namespace pwf
