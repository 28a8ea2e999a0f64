#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "pwf/common.hpp"
#include "pwf/field.hpp"
#include "pwf/fft.hpp"
#include "pwf/helicity.hpp"
#include "pwf/medium.hpp"
#include "pwf/rs.hpp"

namespace pwf {

enum class Integrator {
    maxwell_rk4,    // curl-form stepping, any static medium
    maxwell_exact,  // curl-form advanced exactly per mode; uniform media only
    rs_vacuum,      // helicity phase evolution; vacuum only
};

inline const char* to_string(Integrator i) {
    switch (i) {
        case Integrator::maxwell_rk4: return "maxwell_rk4";
        case Integrator::maxwell_exact: return "maxwell_exact";
        case Integrator::rs_vacuum: return "rs_vacuum";
    }
    return "?";
}

struct EvolutionConfig {
    double dt = 0.0;
    int n_steps = 0;
    Integrator integrator = Integrator::maxwell_rk4;
    bool cfl_guard = true;
    int snapshot_stride = 1;      // 0 disables snapshot storage
    bool continuity = false;      // collect per-step continuity rows
};

/// Largest time step admitted by the guard:
/// dt <= min(dx,dy,dz) * min(n) / (sqrt(3) c).
inline double cfl_limit(const Grid3& g, const MediumMap& medium) {
    const double h = std::min({g.dx(), g.dy(), g.dz()});
    return h * medium.min_n() / (std::sqrt(3.0) * c_internal);
}

/// Right-hand side of the curl equations in a linear static medium:
///   dE/dt = (1/eps) curl(B/mu),   dB/dt = -curl(E).
inline void field_time_derivative(const RealFieldPair& f, const MediumMap& medium,
                                  RealVectorField& dE, RealVectorField& dB) {
    const Grid3& g = f.grid();
    RealVectorField h(g);
    for (int c = 0; c < 3; ++c)
        for (std::int64_t i = 0; i < g.size(); ++i)
            h.comp[c][i] = f.B.comp[c][i] / medium.mu(i);
    RealVectorField curl_h = curl(h);
    RealVectorField curl_e = curl(f.E);
    for (int c = 0; c < 3; ++c)
        for (std::int64_t i = 0; i < g.size(); ++i) {
            dE.comp[c][i] = curl_h.comp[c][i] / medium.eps(i);
            dB.comp[c][i] = -curl_e.comp[c][i];
        }
}

/// Bound current J = d P/dt + curl M with P = chi_e eps0 E and
/// M = chi_m B / ((1+chi_m) mu0); dE/dt is eliminated via the curl
/// equations so the result is a pure function of the snapshot.
inline RealVectorField bound_current(const RealFieldPair& f, const MediumMap& medium) {
    const Grid3& g = f.grid();
    RealVectorField dE(g), dB(g);
    field_time_derivative(f, medium, dE, dB);
    RealVectorField j(g);
    bool any_chi_m = false;
    for (std::int64_t i = 0; i < g.size() && !any_chi_m; ++i)
        if (medium.chi_m().values[i] != 0.0) any_chi_m = true;
    if (any_chi_m) {
        RealVectorField m(g);
        for (int c = 0; c < 3; ++c)
            for (std::int64_t i = 0; i < g.size(); ++i) {
                const double cm = medium.chi_m().values[i];
                m.comp[c][i] = cm * f.B.comp[c][i] / ((1.0 + cm) * mu0_internal);
            }
        j = curl(m);
    }
    for (int c = 0; c < 3; ++c)
        for (std::int64_t i = 0; i < g.size(); ++i)
            j.comp[c][i] += medium.chi_e().values[i] * eps0_internal * dE.comp[c][i];
    return j;
}

namespace detail {

inline void check_step_args(const RealFieldPair& f, const MediumMap& medium, double dt,
                            bool cfl_guard) {
    if (f.grid() != medium.grid()) fail("step: field/medium grid mismatch");
    if (!(dt > 0.0)) fail("step: dt must be positive");
    if (cfl_guard && dt > cfl_limit(f.grid(), medium) * (1.0 + 1e-12))
        fail("step: dt violates the CFL guard (limit " +
             std::to_string(cfl_limit(f.grid(), medium)) + ")");
}

} // namespace detail

/// One RK4 step of the curl equations. Spatial derivatives are spectral and
/// exact for band-limited fields; the temporal scheme is classical order 4.
inline RealFieldPair step(const RealFieldPair& f, const MediumMap& medium, double dt,
                          bool cfl_guard = true) {
    detail::check_step_args(f, medium, dt, cfl_guard);
    const Grid3& g = f.grid();

    auto axpy = [&](const RealFieldPair& base, double a, const RealVectorField& dE,
                    const RealVectorField& dB) {
        RealFieldPair out = base;
        for (int c = 0; c < 3; ++c)
            for (std::int64_t i = 0; i < g.size(); ++i) {
                out.E.comp[c][i] += a * dE.comp[c][i];
                out.B.comp[c][i] += a * dB.comp[c][i];
            }
        return out;
    };

    RealVectorField k1e(g), k1b(g), k2e(g), k2b(g), k3e(g), k3b(g), k4e(g), k4b(g);
    field_time_derivative(f, medium, k1e, k1b);
    field_time_derivative(axpy(f, 0.5 * dt, k1e, k1b), medium, k2e, k2b);
    field_time_derivative(axpy(f, 0.5 * dt, k2e, k2b), medium, k3e, k3b);
    field_time_derivative(axpy(f, dt, k3e, k3b), medium, k4e, k4b);

    RealFieldPair out = f;
    out.t = f.t + dt;
    const double w = dt / 6.0;
    for (int c = 0; c < 3; ++c)
        for (std::int64_t i = 0; i < g.size(); ++i) {
            out.E.comp[c][i] += w * (k1e.comp[c][i] + 2 * k2e.comp[c][i] + 2 * k3e.comp[c][i] +
                                     k4e.comp[c][i]);
            out.B.comp[c][i] += w * (k1b.comp[c][i] + 2 * k2b.comp[c][i] + 2 * k3b.comp[c][i] +
                                     k4b.comp[c][i]);
        }
    return out;
}

/// Exact per-mode advance of the curl equations in a uniform medium. Each
/// transverse Fourier mode rotates with angular rate w = c k / n; k = 0 and
/// longitudinal content is held fixed (it has no curl dynamics).
inline RealFieldPair step_exact_uniform(const RealFieldPair& f, const MediumMap& medium,
                                        double dt) {
    if (f.grid() != medium.grid()) fail("step_exact_uniform: grid mismatch");
    if (!medium.is_uniform()) fail("step_exact_uniform: medium must be uniform");
    const Grid3& g = f.grid();
    const double eps = (1.0 + medium.uniform_chi_e()) * eps0_internal;
    const double mu = (1.0 + medium.uniform_chi_m()) * mu0_internal;
    const double n_idx = medium.uniform_n();

    ComplexVectorField E = to_complex(f.E), B = to_complex(f.B);
    fft_forward(E);
    fft_forward(B);
    detail::for_each_mode(g, [&](std::int64_t i, const Vec3& k) {
        const double kn = norm(k);
        if (kn == 0.0) return;
        const double w = c_internal * kn / n_idx;
        const double cs = std::cos(w * dt), sn = std::sin(w * dt);
        const CVec3 e{E.comp[0][i], E.comp[1][i], E.comp[2][i]};
        const CVec3 b{B.comp[0][i], B.comp[1][i], B.comp[2][i]};
        const Vec3 kh = {k[0] / kn, k[1] / kn, k[2] / kn};
        const complexd el = e[0] * kh[0] + e[1] * kh[1] + e[2] * kh[2];
        const complexd bl = b[0] * kh[0] + b[1] * kh[1] + b[2] * kh[2];
        const CVec3 ik_x_b = {iunit * (k[1] * b[2] - k[2] * b[1]),
                              iunit * (k[2] * b[0] - k[0] * b[2]),
                              iunit * (k[0] * b[1] - k[1] * b[0])};
        const CVec3 ik_x_e = {iunit * (k[1] * e[2] - k[2] * e[1]),
                              iunit * (k[2] * e[0] - k[0] * e[2]),
                              iunit * (k[0] * e[1] - k[1] * e[0])};
        // dE/dt = (1/(eps mu)) i k x B, dB/dt = -i k x E; transverse modes
        // rotate at w, longitudinal projections have no curl dynamics.
        for (int c = 0; c < 3; ++c) {
            const complexd et = e[c] - el * kh[c];
            const complexd bt = b[c] - bl * kh[c];
            E.comp[c][i] = el * kh[c] + cs * et + sn / (w * eps * mu) * ik_x_b[c];
            B.comp[c][i] = bl * kh[c] + cs * bt - sn / w * ik_x_e[c];
        }
    });
    fft_inverse(E);
    fft_inverse(B);

    RealFieldPair out(g, f.t + dt);
    out.E = real_part(E);
    out.B = real_part(B);
    return out;
}

/// Exact vacuum helicity evolution: every mode acquires the phase
/// exp(-i w dt) with w = c k, for both helicities.
inline RSState step_rs_vacuum(const RSState& s, double dt) {
    const Grid3& g = s.grid();
    RSState out = s;
    out.t = s.t + dt;
    for (ComplexVectorField* f : {&out.psi_plus, &out.psi_minus}) {
        fft_forward(*f);
        detail::for_each_mode(g, [&](std::int64_t i, const Vec3& k) {
            const complexd ph = std::exp(-iunit * (c_internal * norm(k) * dt));
            for (int c = 0; c < 3; ++c) f->comp[c][i] *= ph;
        });
        fft_inverse(*f);
    }
    return out;
}

/// Guarded overload: the helicity stepper is only valid in vacuum.
inline RSState step_rs_vacuum(const RSState& s, const MediumMap& medium, double dt) {
    if (!medium.is_vacuum()) fail("step_rs_vacuum: requires a vacuum medium");
    return step_rs_vacuum(s, dt);
}

/// Spectral divergence residuals (div B, div D) with D = eps E.
inline std::pair<double, double> divergence_residual(const RealFieldPair& f,
                                                     const MediumMap& medium) {
    if (f.grid() != medium.grid()) fail("divergence_residual: grid mismatch");
    RealVectorField d(f.grid());
    for (int c = 0; c < 3; ++c)
        for (std::int64_t i = 0; i < f.grid().size(); ++i)
            d.comp[c][i] = medium.eps(i) * f.E.comp[c][i];
    return {divergence_rms(f.B), divergence_rms(d)};
}

/// One row of the energy-continuity audit.
struct ContinuityRow {
    int step = 0;
    double time = 0.0;
    double dE_dt = 0.0;     // centered difference of the photon norm
    double flux = 0.0;      // boundary flux; identically zero on the torus
    double work = 0.0;      // integral of E_T . J
    double residual = 0.0;  // dE_dt - (-flux - work)
};

struct ContinuityReport {
    std::vector<ContinuityRow> rows;
    double energy_scale = 0.0;  // max photon norm over the run

    double max_abs_residual() const {
        double m = 0.0;
        for (const auto& r : rows) m = std::max(m, std::abs(r.residual));
        return m;
    }
};

namespace detail {

/// Photon norm and transverse work integral at one snapshot.
inline void continuity_sample(const RealFieldPair& f, const MediumMap& medium, double& norm_out,
                              double& work_out) {
    RSState psi = rs_compose_vacuum(f);
    norm_out = energy_density(psi).integral();
    // E_T recovered from the composed state avoids a second projection.
    RealVectorField e_t(f.grid());
    const double scale = std::sqrt(2.0 / eps0_internal);
    for (int c = 0; c < 3; ++c)
        for (std::int64_t i = 0; i < f.grid().size(); ++i)
            e_t.comp[c][i] =
                scale * (psi.psi_plus.comp[c][i] + psi.psi_minus.comp[c][i]).real();
    RealVectorField j = bound_current(f, medium);
    double acc = 0.0;
    for (int c = 0; c < 3; ++c)
        for (std::int64_t i = 0; i < f.grid().size(); ++i)
            acc += e_t.comp[c][i] * j.comp[c][i];
    work_out = acc * f.grid().cell_volume();
}

inline ContinuityReport continuity_from_samples(const std::vector<double>& norms,
                                                const std::vector<double>& works,
                                                const std::vector<double>& times, double dt,
                                                bool flip_work_sign) {
    ContinuityReport rep;
    for (double u : norms) rep.energy_scale = std::max(rep.energy_scale, u);
    const double sign = flip_work_sign ? -1.0 : 1.0;
    for (std::size_t i = 1; i + 1 < norms.size(); ++i) {
        ContinuityRow row;
        row.step = static_cast<int>(i);
        row.time = times[i];
        row.dE_dt = (norms[i + 1] - norms[i - 1]) / (2.0 * dt);
        row.flux = 0.0;
        row.work = sign * works[i];
        row.residual = row.dE_dt - (-row.flux - row.work);
        rep.rows.push_back(row);
    }
    return rep;
}

} // namespace detail

/// Audit a uniformly sampled trajectory against the energy continuity
/// equation. The test hook flips the sign of the work term so a deliberate
/// fault is detectable.
inline ContinuityReport continuity_check(const std::vector<RealFieldPair>& trajectory,
                                         const MediumMap& medium, double dt,
                                         bool flip_work_sign = false) {
    if (trajectory.size() < 3)
        fail("continuity_check: need at least 3 snapshots for a centered derivative");
    if (!(dt > 0.0)) fail("continuity_check: dt must be positive");
    std::vector<double> norms, works, times;
    for (const auto& f : trajectory) {
        double u, w;
        detail::continuity_sample(f, medium, u, w);
        norms.push_back(u);
        works.push_back(w);
        times.push_back(f.t);
    }
    return detail::continuity_from_samples(norms, works, times, dt, flip_work_sign);
}

struct RunResult {
    std::vector<RealFieldPair> snapshots;  // per snapshot_stride (includes initial)
    ContinuityReport continuity;
    RealFieldPair final_state;
};

using StepObserver = std::function<void(int step, const RealFieldPair&)>;

/// Drive the configured integrator for n_steps, collecting snapshots,
/// optional continuity rows and invoking observers sequentially.
inline RunResult run(const RealFieldPair& initial, const MediumMap& medium,
                     const EvolutionConfig& cfg, const StepObserver& observer = {}) {
    if (!(cfg.n_steps >= 0)) fail("run: n_steps must be >= 0");
    if (cfg.n_steps > 0) detail::check_step_args(initial, medium, cfg.dt, cfg.cfl_guard);
    if (cfg.integrator == Integrator::maxwell_exact && !medium.is_uniform())
        fail("run: maxwell_exact requires a uniform medium");
    if (cfg.integrator == Integrator::rs_vacuum && !medium.is_vacuum())
        fail("run: rs_vacuum requires vacuum");

    RunResult result;
    std::vector<double> norms, works, times;

    RealFieldPair f = initial;
    RSState rs_state;
    if (cfg.integrator == Integrator::rs_vacuum) rs_state = rs_compose_vacuum(f);

    auto record = [&](int s) {
        if (cfg.snapshot_stride > 0 && s % cfg.snapshot_stride == 0)
            result.snapshots.push_back(f);
        if (cfg.continuity) {
            double u, w;
            detail::continuity_sample(f, medium, u, w);
            norms.push_back(u);
            works.push_back(w);
            times.push_back(f.t);
        }
        if (observer) observer(s, f);
    };

    record(0);
    for (int s = 1; s <= cfg.n_steps; ++s) {
        switch (cfg.integrator) {
            case Integrator::maxwell_rk4:
                f = step(f, medium, cfg.dt, cfg.cfl_guard);
                break;
            case Integrator::maxwell_exact:
                f = step_exact_uniform(f, medium, cfg.dt);
                break;
            case Integrator::rs_vacuum:
                rs_state = step_rs_vacuum(rs_state, cfg.dt);
                f = rs_decompose_vacuum(rs_state);
                f.t = rs_state.t;
                break;
        }
        if (!f.finite()) fail("run: non-finite field detected at step " + std::to_string(s));
        record(s);
    }

    if (cfg.continuity)
        result.continuity = detail::continuity_from_samples(norms, works, times, cfg.dt, false);
    result.final_state = f;
    return result;
}

} // namespace pwf
