#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pwf/common.hpp"
#include "pwf/grid.hpp"

namespace pwf {

/// Real scalar samples on a Grid3.
struct RealScalarField {
    Grid3 grid;
    std::vector<double> values;

    RealScalarField() = default;
    explicit RealScalarField(const Grid3& g, double fill = 0.0)
        : grid(g), values(g.size(), fill) {}

    double& operator()(int ix, int iy, int iz) { return values[grid.index(ix, iy, iz)]; }
    double operator()(int ix, int iy, int iz) const { return values[grid.index(ix, iy, iz)]; }

    double integral() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s * grid.cell_volume();
    }
    double max_abs() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }
};

/// Real 3-vector field, one contiguous array per Cartesian component.
struct RealVectorField {
    Grid3 grid;
    std::array<std::vector<double>, 3> comp;

    RealVectorField() = default;
    explicit RealVectorField(const Grid3& g) : grid(g) {
        for (auto& c : comp) c.assign(g.size(), 0.0);
    }

    Vec3 at(std::int64_t i) const { return {comp[0][i], comp[1][i], comp[2][i]}; }
    void set(std::int64_t i, const Vec3& v) {
        comp[0][i] = v[0];
        comp[1][i] = v[1];
        comp[2][i] = v[2];
    }

    bool finite() const {
        for (const auto& c : comp)
            for (double v : c)
                if (!std::isfinite(v)) return false;
        return true;
    }

    double l2_norm2() const {  // integral of |F|^2
        double s = 0.0;
        for (const auto& c : comp)
            for (double v : c) s += v * v;
        return s * grid.cell_volume();
    }
    double rms() const { return std::sqrt(l2_norm2() / grid.volume()); }
};

/// Complex 3-vector field; houses the photon wave function components.
struct ComplexVectorField {
    Grid3 grid;
    std::array<std::vector<complexd>, 3> comp;

    ComplexVectorField() = default;
    explicit ComplexVectorField(const Grid3& g) : grid(g) {
        for (auto& c : comp) c.assign(g.size(), complexd{});
    }

    CVec3 at(std::int64_t i) const { return {comp[0][i], comp[1][i], comp[2][i]}; }
    void set(std::int64_t i, const CVec3& v) {
        comp[0][i] = v[0];
        comp[1][i] = v[1];
        comp[2][i] = v[2];
    }

    /// Index of the first non-finite entry, or -1 if all finite.
    /// Encoded as component*size + flat index for the diagnostic message.
    std::int64_t first_non_finite() const {
        for (int c = 0; c < 3; ++c)
            for (std::int64_t i = 0; i < grid.size(); ++i) {
                const complexd& v = comp[c][i];
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                    return std::int64_t(c) * grid.size() + i;
            }
        return -1;
    }
    bool finite() const { return first_non_finite() < 0; }

    double l2_norm2() const {  // integral of |F|^2
        double s = 0.0;
        for (const auto& c : comp)
            for (const complexd& v : c) s += std::norm(v);
        return s * grid.cell_volume();
    }
    double rms() const { return std::sqrt(l2_norm2() / grid.volume()); }

    ComplexVectorField& operator+=(const ComplexVectorField& o) {
        for (int c = 0; c < 3; ++c)
            for (std::int64_t i = 0; i < grid.size(); ++i) comp[c][i] += o.comp[c][i];
        return *this;
    }
    ComplexVectorField& operator-=(const ComplexVectorField& o) {
        for (int c = 0; c < 3; ++c)
            for (std::int64_t i = 0; i < grid.size(); ++i) comp[c][i] -= o.comp[c][i];
        return *this;
    }
    ComplexVectorField& operator*=(complexd s) {
        for (int c = 0; c < 3; ++c)
            for (auto& v : comp[c]) v *= s;
        return *this;
    }
};

inline ComplexVectorField operator+(ComplexVectorField a, const ComplexVectorField& b) {
    a += b;
    return a;
}
inline ComplexVectorField operator-(ComplexVectorField a, const ComplexVectorField& b) {
    a -= b;
    return a;
}

/// Relative RMS difference, normalized by the RMS of the reference b.
inline double relative_rms_diff(const ComplexVectorField& a, const ComplexVectorField& b) {
    double num = 0.0, den = 0.0;
    for (int c = 0; c < 3; ++c)
        for (std::int64_t i = 0; i < a.grid.size(); ++i) {
            num += std::norm(a.comp[c][i] - b.comp[c][i]);
            den += std::norm(b.comp[c][i]);
        }
    if (den == 0.0) return std::sqrt(num);
    return std::sqrt(num / den);
}

inline double relative_rms_diff(const RealVectorField& a, const RealVectorField& b) {
    double num = 0.0, den = 0.0;
    for (int c = 0; c < 3; ++c)
        for (std::int64_t i = 0; i < a.grid.size(); ++i) {
            const double d = a.comp[c][i] - b.comp[c][i];
            num += d * d;
            den += b.comp[c][i] * b.comp[c][i];
        }
    if (den == 0.0) return std::sqrt(num);
    return std::sqrt(num / den);
}

/// Electric/magnetic snapshot of the photon field, internal units.
struct RealFieldPair {
    RealVectorField E;
    RealVectorField B;
    double t = 0.0;

    RealFieldPair() = default;
    explicit RealFieldPair(const Grid3& g, double time = 0.0) : E(g), B(g), t(time) {}

    const Grid3& grid() const { return E.grid; }
    bool finite() const { return E.finite() && B.finite(); }
};

} // namespace pwf
