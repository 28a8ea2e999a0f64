#pragma once

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include "pwf/common.hpp"
#include "pwf/field.hpp"

namespace pwf {

/// 3-D complex FFT on the Grid3 layout (row-major, z fastest).
///
/// Convention: forward() produces mode coefficients F_k with
///   f(r) = sum_k F_k exp(+i k.r),
/// i.e. the forward transform carries the 1/N normalization and inverse()
/// is the plain mode sum. Plans are cached per grid shape and executed
/// through a private aligned buffer, so callers can pass ordinary vectors.
class Fft3 {
  public:
    static Fft3& get(int nx, int ny, int nz) {
        static std::map<std::tuple<int, int, int>, std::unique_ptr<Fft3>> cache;
        static std::mutex mtx;
        std::lock_guard<std::mutex> lock(mtx);
        auto key = std::make_tuple(nx, ny, nz);
        auto it = cache.find(key);
        if (it == cache.end())
            it = cache.emplace(key, std::unique_ptr<Fft3>(new Fft3(nx, ny, nz))).first;
        return *it->second;
    }
    static Fft3& get(const Grid3& g) { return get(g.nx, g.ny, g.nz); }

    ~Fft3() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buf_);
    }

    Fft3(const Fft3&) = delete;
    Fft3& operator=(const Fft3&) = delete;

    /// In-place forward transform (spatial samples -> mode coefficients).
    void forward(std::vector<complexd>& a) {
        std::lock_guard<std::mutex> lock(exec_mtx_);
        copy_in(a);
        fftw_execute(fwd_);
        const double scale = 1.0 / double(n_);
        auto* b = reinterpret_cast<complexd*>(buf_);
        for (std::int64_t i = 0; i < n_; ++i) a[i] = b[i] * scale;
    }

    /// In-place inverse transform (mode coefficients -> spatial samples).
    void inverse(std::vector<complexd>& a) {
        std::lock_guard<std::mutex> lock(exec_mtx_);
        copy_in(a);
        fftw_execute(bwd_);
        auto* b = reinterpret_cast<complexd*>(buf_);
        for (std::int64_t i = 0; i < n_; ++i) a[i] = b[i];
    }

  private:
    Fft3(int nx, int ny, int nz) : n_(std::int64_t(nx) * ny * nz) {
        buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n_));
        if (!buf_) fail("Fft3: allocation failed");
        fwd_ = fftw_plan_dft_3d(nx, ny, nz, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_3d(nx, ny, nz, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
        if (!fwd_ || !bwd_) fail("Fft3: planning failed");
    }

    void copy_in(const std::vector<complexd>& a) {
        if (std::int64_t(a.size()) != n_) fail("Fft3: size mismatch");
        auto* b = reinterpret_cast<complexd*>(buf_);
        for (std::int64_t i = 0; i < n_; ++i) b[i] = a[i];
    }

    std::int64_t n_;
    fftw_complex* buf_;
    fftw_plan fwd_, bwd_;
    std::mutex exec_mtx_;
};

/// Forward-transform all three components of a complex vector field.
inline void fft_forward(ComplexVectorField& f) {
    auto& fft = Fft3::get(f.grid);
    for (auto& c : f.comp) fft.forward(c);
}

inline void fft_inverse(ComplexVectorField& f) {
    auto& fft = Fft3::get(f.grid);
    for (auto& c : f.comp) fft.inverse(c);
}

/// Complexify a real vector field (imaginary parts zero).
inline ComplexVectorField to_complex(const RealVectorField& f) {
    ComplexVectorField out(f.grid);
    for (int c = 0; c < 3; ++c)
        for (std::int64_t i = 0; i < f.grid.size(); ++i) out.comp[c][i] = f.comp[c][i];
    return out;
}

inline RealVectorField real_part(const ComplexVectorField& f) {
    RealVectorField out(f.grid);
    for (int c = 0; c < 3; ++c)
        for (std::int64_t i = 0; i < f.grid.size(); ++i) out.comp[c][i] = f.comp[c][i].real();
    return out;
}

inline RealVectorField imag_part(const ComplexVectorField& f) {
    RealVectorField out(f.grid);
    for (int c = 0; c < 3; ++c)
        for (std::int64_t i = 0; i < f.grid.size(); ++i) out.comp[c][i] = f.comp[c][i].imag();
    return out;
}

} // namespace pwf
