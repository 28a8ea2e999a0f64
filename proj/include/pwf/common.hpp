#pragma once

#include <atomic>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace pwf {

using complexd = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;

// Internal unit system: c = eps0 = mu0 = hbar = 1.
inline constexpr double c_internal = 1.0;
inline constexpr double eps0_internal = 1.0;
inline constexpr double mu0_internal = 1.0;
inline constexpr double hbar_internal = 1.0;

inline const complexd iunit{0.0, 1.0};

[[noreturn]] inline void fail(const std::string& what) { throw std::runtime_error(what); }

/// Non-fatal diagnostic channel. Messages go to stderr; tests may install a sink.
inline std::function<void(const std::string&)>& warn_sink() {
    static std::function<void(const std::string&)> sink;
    return sink;
}

inline void warn(const std::string& msg) {
    if (warn_sink()) {
        warn_sink()(msg);
    } else {
        std::fprintf(stderr, "[pwf] warning: %s\n", msg.c_str());
    }
}

/// Process-wide thread override (e.g. from a scenario config); 0 defers to
/// the THREADS environment variable and the hardware count.
inline std::atomic<int>& default_threads() {
    static std::atomic<int> v{0};
    return v;
}

/// Thread count resolution: explicit arg > config override > THREADS env >
/// hardware.
inline int resolve_threads(int requested = 0) {
    if (requested > 0) return requested;
    if (int cfg = default_threads().load(); cfg > 0) return cfg;
    if (const char* env = std::getenv("THREADS")) {
        int t = std::atoi(env);
        if (t > 0) return t;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Chunked parallel loop over [0, n). Each worker owns a contiguous index
/// range, so pointwise writes are race-free and bitwise reproducible for a
/// fixed thread count.
template <class Fn>
void parallel_for(std::int64_t n, Fn&& fn, int threads = 0) {
    const int nt = std::min<std::int64_t>(resolve_threads(threads), std::max<std::int64_t>(n, 1));
    if (nt <= 1 || n < 1024) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::int64_t chunk = (n + nt - 1) / nt;
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) {
        const std::int64_t lo = t * chunk;
        const std::int64_t hi = std::min<std::int64_t>(lo + chunk, n);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::int64_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

/// Chunked parallel reduction; partials are combined in chunk order, so the
/// result is deterministic for a fixed thread count.
template <class Fn>
double parallel_reduce(std::int64_t n, Fn&& fn, int threads = 0) {
    const int nt = std::min<std::int64_t>(resolve_threads(threads), std::max<std::int64_t>(n, 1));
    if (nt <= 1 || n < 1024) {
        double acc = 0.0;
        for (std::int64_t i = 0; i < n; ++i) acc += fn(i);
        return acc;
    }
    const std::int64_t chunk = (n + nt - 1) / nt;
    std::vector<double> partial((n + chunk - 1) / chunk, 0.0);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < partial.size(); ++t) {
        const std::int64_t lo = static_cast<std::int64_t>(t) * chunk;
        const std::int64_t hi = std::min<std::int64_t>(lo + chunk, n);
        pool.emplace_back([lo, hi, t, &partial, &fn] {
            double acc = 0.0;
            for (std::int64_t i = lo; i < hi; ++i) acc += fn(i);
            partial[t] = acc;
        });
    }
    for (auto& th : pool) th.join();
    double acc = 0.0;
    for (double p : partial) acc += p;
    return acc;
}

} // namespace pwf
