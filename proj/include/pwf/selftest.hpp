#pragma once

#include <chrono>
#include <random>
#include <string>
#include <vector>

#include "pwf/born.hpp"
#include "pwf/modes.hpp"
#include "pwf/propagator.hpp"
#include "pwf/schmidt.hpp"
#include "pwf/spdc.hpp"
#include "pwf/units.hpp"

namespace pwf {

struct SelfTestCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SelfTestReport {
    std::vector<SelfTestCheck> checks;
    double wall_time_s = 0.0;

    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

namespace selftest_detail {

inline RSState random_state(const Grid3& g, std::mt19937_64& rng, int n_modes) {
    std::uniform_int_distribution<int> dx(-g.nx / 4, g.nx / 4), dy(-g.ny / 4, g.ny / 4),
        dz(-g.nz / 4, g.nz / 4);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    RSState s(g);
    for (int m = 0; m < n_modes; ++m) {
        int mx = dx(rng), my = dy(rng), mz = dz(rng);
        if (mx == 0 && my == 0 && mz == 0) mz = 1;
        const Vec3 k = {2 * pi * mx / g.Lx, 2 * pi * my / g.Ly, 2 * pi * mz / g.Lz};
        const HelicityBasis b = helicity_basis(k);
        const complexd ap(amp(rng), amp(rng)), am(amp(rng), amp(rng));
        ComplexVectorField fp(g), fm(g);
        for (int ix = 0; ix < g.nx; ++ix)
            for (int iy = 0; iy < g.ny; ++iy)
                for (int iz = 0; iz < g.nz; ++iz) {
                    const double ph = k[0] * g.x(ix) + k[1] * g.y(iy) + k[2] * g.z(iz);
                    const complexd e = std::exp(iunit * ph);
                    const std::int64_t i = g.index(ix, iy, iz);
                    const CVec3 ep = b.e_plus(), em = b.e_minus();
                    for (int c = 0; c < 3; ++c) {
                        fp.comp[c][i] = ap * ep[c] * e;
                        fm.comp[c][i] = am * em[c] * e;
                    }
                }
        s.psi_plus += fp;
        s.psi_minus += fm;
    }
    return s;
}

inline RealFieldPair packet_1d(const Grid3& g, double z0, double sigma, double k0) {
    RealFieldPair f(g);
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy)
            for (int iz = 0; iz < g.nz; ++iz) {
                const double z = g.z(iz);
                const double v =
                    std::exp(-0.5 * std::pow((z - z0) / sigma, 2)) * std::cos(k0 * (z - z0));
                const std::int64_t i = g.index(ix, iy, iz);
                f.E.comp[0][i] = v;
                f.B.comp[1][i] = v;
            }
    return f;
}

template <class Fn>
void check(SelfTestReport& rep, const std::string& name, Fn&& fn) {
    SelfTestCheck c;
    c.name = name;
    try {
        auto [ok, detail] = fn();
        c.passed = ok;
        c.detail = detail;
    } catch (const std::exception& e) {
        c.passed = false;
        c.detail = std::string("exception: ") + e.what();
    }
    rep.checks.push_back(std::move(c));
}

inline std::string rel(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

} // namespace selftest_detail

/// Reduced-size battery over the module invariants. Designed to finish in
/// well under five minutes; any failure names the violated check.
///
/// `inject_work_sign_fault` flips the sign of the continuity work term, a
/// deliberate fault that the energy audit must detect.
inline SelfTestReport selftest(bool inject_work_sign_fault = false) {
    using namespace selftest_detail;
    const auto t0 = std::chrono::steady_clock::now();
    SelfTestReport rep;
    std::mt19937_64 rng(20240811);

    check(rep, "unit round trips", [&]() -> std::pair<bool, std::string> {
        UnitSystem u(0.8e-6);
        double worst = 0.0;
        for (double v : {1.0, 3.7e-9, 2.2e14}) {
            worst = std::max(worst,
                             std::abs(u.energy_from_si(u.energy_to_si(v)) - v) / v);
            worst = std::max(worst, std::abs(u.time_from_si(u.time_to_si(v)) - v) / v);
        }
        return {worst <= 1e-14, "worst rel " + rel(worst)};
    });

    check(rep, "helicity projection", [&]() -> std::pair<bool, std::string> {
        Grid3 g(8, 8, 8, 1, 1, 1);
        ComplexVectorField f(g);
        std::uniform_real_distribution<double> u(-1, 1);
        for (auto& c : f.comp)
            for (auto& v : c) v = complexd(u(rng), u(rng));
        auto sp = helicity_project(f);
        auto sum = sp.plus + sp.minus + sp.longitudinal;
        const double recon = relative_rms_diff(sum, f);
        auto again = helicity_project(sp.plus);
        const double idem = relative_rms_diff(again.plus, sp.plus);
        return {recon < 1e-13 && idem < 1e-12,
                "reconstruct " + rel(recon) + ", idempotent " + rel(idem)};
    });

    check(rep, "rs compose/decompose round trip", [&]() -> std::pair<bool, std::string> {
        Grid3 g(8, 8, 8, 1, 1, 1);
        auto medium = MediumMap::uniform(g, 1.25, 0.4);
        auto s = random_state(g, rng, 12);
        auto f = rs_decompose(s, medium);
        auto back = rs_compose(f, medium);
        const double err = relative_rms_diff(back.psi_plus, s.psi_plus) +
                           relative_rms_diff(back.psi_minus, s.psi_minus);
        return {err < 1e-12, "rel " + rel(err)};
    });

    check(rep, "dressed energy identity", [&]() -> std::pair<bool, std::string> {
        Grid3 g(6, 6, 6, 1, 1, 1);
        double worst = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            auto medium = MediumMap::uniform(g, 0.3 + 0.4 * trial, 0.0);
            auto s = random_state(g, rng, 10);
            auto f = rs_decompose(s, medium);
            auto fq = rs_decompose(quadrature_state(s), medium);
            auto lhs = energy_density_by_helicity(s);
            auto em = em_energy_density(f), emq = em_energy_density(fq);
            auto um = material_energy_density(f, medium),
                 umq = material_energy_density(fq, medium);
            const double scale = lhs.max_abs();
            for (std::int64_t i = 0; i < g.size(); ++i) {
                const double rhs = 0.5 * (em.values[i] + emq.values[i]) + um.values[i] +
                                   umq.values[i];
                worst = std::max(worst, std::abs(lhs.values[i] - rhs) / scale);
            }
        }
        return {worst < 1e-12, "worst rel " + rel(worst)};
    });

    check(rep, "energy flux cycle identity", [&]() -> std::pair<bool, std::string> {
        Grid3 g(8, 8, 8, 1, 1, 1);
        RSState s(g);
        const Vec3 k = {0, 0, 2 * pi * 2 / g.Lz};
        const auto b = helicity_basis(k);
        for (int ix = 0; ix < g.nx; ++ix)
            for (int iy = 0; iy < g.ny; ++iy)
                for (int iz = 0; iz < g.nz; ++iz) {
                    const complexd e = std::exp(iunit * (k[2] * g.z(iz)));
                    const std::int64_t i = g.index(ix, iy, iz);
                    const CVec3 ep = b.e_plus();
                    for (int c = 0; c < 3; ++c) s.psi_plus.comp[c][i] = ep[c] * e;
                }
        auto flux = poynting_current(s);
        auto dens = energy_density(s);
        double worst = 0.0;
        for (std::int64_t i = 0; i < g.size(); ++i)
            worst = std::max(worst,
                             std::abs(flux.comp[2][i] - c_internal * dens.values[i]));
        return {worst < 1e-12, "worst abs " + rel(worst)};
    });

    check(rep, "vacuum integrator equivalence", [&]() -> std::pair<bool, std::string> {
        Grid3 g(16, 16, 16, 2, 2, 2);
        auto medium = MediumMap::vacuum(g);
        auto f0 = rs_decompose_vacuum(random_state(g, rng, 10));
        EvolutionConfig cfg;
        cfg.dt = 0.5 * cfl_limit(g, medium);
        cfg.n_steps = 50;
        cfg.snapshot_stride = 0;
        cfg.integrator = Integrator::rs_vacuum;
        auto a = run(f0, medium, cfg);
        cfg.integrator = Integrator::maxwell_exact;
        auto b = run(f0, medium, cfg);
        const double err = relative_rms_diff(a.final_state.E, b.final_state.E);
        return {err < 1e-10, "rel rms " + rel(err)};
    });

    check(rep, "rk4 dispersion, n = 1.5", [&]() -> std::pair<bool, std::string> {
        Grid3 g(2, 2, 120, 2, 2, 120);
        auto medium = MediumMap::uniform(g, 1.25, 0.0);
        const int mz = 6;
        const double k = 2 * pi * mz / g.Lz;
        RealFieldPair f0(g);
        for (int ix = 0; ix < g.nx; ++ix)
            for (int iy = 0; iy < g.ny; ++iy)
                for (int iz = 0; iz < g.nz; ++iz) {
                    const std::int64_t i = g.index(ix, iy, iz);
                    f0.E.comp[0][i] = std::cos(k * g.z(iz));
                    f0.B.comp[1][i] = 1.5 * std::cos(k * g.z(iz));
                }
        EvolutionConfig cfg;
        cfg.dt = 0.5 * cfl_limit(g, medium);
        cfg.snapshot_stride = 0;
        const double period = 2 * pi / (k / 1.5);
        cfg.n_steps = static_cast<int>(std::round(period / cfg.dt));
        cfg.dt = period / cfg.n_steps;
        auto res = run(f0, medium, cfg);
        auto s0 = to_complex(f0.E), s1 = to_complex(res.final_state.E);
        fft_forward(s0);
        fft_forward(s1);
        const complexd r = s1.comp[0][g.index(0, 0, mz)] / s0.comp[0][g.index(0, 0, mz)];
        const double v = ((2 * pi - std::arg(r)) / period) / k;
        const double err = std::abs(v - 1.0 / 1.5) * 1.5;
        return {err < 0.01, "phase velocity rel err " + rel(err)};
    });

    check(rep, "divergence constraints", [&]() -> std::pair<bool, std::string> {
        Grid3 g(2, 2, 128, 2, 2, 128);
        RealScalarField ce(g), cm(g);
        for (int ix = 0; ix < g.nx; ++ix)
            for (int iy = 0; iy < g.ny; ++iy)
                for (int iz = 0; iz < g.nz; ++iz)
                    ce(ix, iy, iz) = 0.6 * std::exp(-0.5 * std::pow((g.z(iz) - 64) / 10, 2));
        MediumMap medium(ce, cm);
        auto f0 = packet_1d(g, 32, 8, 2 * pi / 12);
        EvolutionConfig cfg;
        cfg.dt = 0.5 * cfl_limit(g, medium);
        cfg.n_steps = 200;
        cfg.snapshot_stride = 0;
        auto res = run(f0, medium, cfg);
        auto [divb, divd] = divergence_residual(res.final_state, medium);
        const double scale = std::max(res.final_state.B.rms(), res.final_state.E.rms());
        const double worst = std::max(divb, divd) / scale;
        return {worst < 1e-8, "residual/rms " + rel(worst)};
    });

    check(rep, "energy continuity audit", [&]() -> std::pair<bool, std::string> {
        Grid3 g(2, 2, 256, 2, 2, 256);
        RealScalarField ce(g), cm(g);
        for (int ix = 0; ix < g.nx; ++ix)
            for (int iy = 0; iy < g.ny; ++iy)
                for (int iz = 0; iz < g.nz; ++iz)
                    ce(ix, iy, iz) = 0.5 * std::exp(-0.5 * std::pow((g.z(iz) - 150) / 18, 2));
        MediumMap medium(ce, cm);
        auto f0 = packet_1d(g, 100, 16, 2 * pi / 14);
        EvolutionConfig cfg;
        cfg.dt = 0.5 * cfl_limit(g, medium);
        cfg.n_steps = 60;
        cfg.snapshot_stride = 1;
        auto res = run(f0, medium, cfg);
        auto good = continuity_check(res.snapshots, medium, cfg.dt, inject_work_sign_fault);
        const double tol = 1e-3 * good.energy_scale / cfg.dt;
        const double r = good.max_abs_residual();
        // positive control: a deliberately flipped work sign must trip the audit
        auto bad = continuity_check(res.snapshots, medium, cfg.dt, !inject_work_sign_fault);
        const bool fault_detected = bad.max_abs_residual() > tol;
        return {r < tol && fault_detected,
                "max residual " + rel(r) + " vs tol " + rel(tol) +
                    (fault_detected ? ", fault detected" : ", fault NOT detected")};
    });

    check(rep, "mode Parseval identity", [&]() -> std::pair<bool, std::string> {
        Grid3 g(8, 8, 8, 1.3, 1.1, 0.9);
        auto medium = MediumMap::uniform(g, 0.8, 0.05);
        auto s = random_state(g, rng, 12);
        auto modes = decompose(s, medium);
        const double h1 = total_energy(modes);
        const double h2 = energy_density(s).integral();
        const double err = std::abs(h1 - h2) / h2;
        return {err <= 1e-10, "rel " + rel(err)};
    });

    check(rep, "two-photon exchange symmetry", [&]() -> std::pair<bool, std::string> {
        Grid3 g(4, 4, 6, 1, 1, 1.5);
        std::uniform_real_distribution<double> u(-1, 1);
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            TwoPhotonSpectral spec;
            for (int t = 0; t < 2; ++t) {
                OnePhotonSpectral a(g), b(g);
                for (std::int64_t i = 1; i < g.size(); ++i) {
                    a.plus[i] = complexd(u(rng), u(rng));
                    b.minus[i] = complexd(u(rng), u(rng));
                }
                a.normalize();
                b.normalize();
                spec.terms.push_back({complexd(u(rng), u(rng)), a, b});
            }
            const Vec3 r1 = {u(rng), u(rng), u(rng)}, r2 = {u(rng), u(rng), u(rng)};
            auto t12 = synthesize_two_photon(spec, r1, r2, 0.2);
            auto t21 = synthesize_two_photon(spec, r2, r1, 0.2);
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    worst = std::max(worst, std::abs(t12[a][b] - t21[b][a]));
        }
        return {worst < 1e-12, "worst abs " + rel(worst)};
    });

    check(rep, "green form equivalence", [&]() -> std::pair<bool, std::string> {
        GreenSpec spec;
        spec.n = 1.4;
        spec.k_max = 24.0;
        spec.apod_width = 12.0;
        const double R = 12.0, w0 = 3.0, sig = 4.0, t0p = 30.0;
        auto pulse = [&](double t) {
            return std::exp(-0.5 * std::pow((t - t0p) / sig, 2)) * std::cos(w0 * (t - t0p));
        };
        const double delay = spec.n * R / c_internal;
        const double t = t0p + delay;
        const double lo = t0p - 8 * sig, hi = std::min(t - 1e-9, t0p + 8 * sig);
        const int nq = 8000;
        const double h = (hi - lo) / nq;
        complexd acc{};
        for (int j = 0; j <= nq; ++j) {
            const double tp = lo + j * h;
            const double w = (j == 0 || j == nq) ? 1.0 : (j % 2 ? 4.0 : 2.0);
            acc += w * (h / 3.0) * green_spectral(R, t - tp, spec) * pulse(tp);
        }
        const double ret = spec.n / (4.0 * pi * R) * pulse(t - delay);
        const double err = std::abs(acc - complexd(ret, 0)) / std::abs(ret);
        return {err < 1e-6, "rel " + rel(err)};
    });

    check(rep, "born scattering sanity", [&]() -> std::pair<bool, std::string> {
        PlaneWaveIncident inc;
        inc.k = {0, 0, 1.0};
        PerturbationSpec pert;
        pert.bumps.push_back({{0, 0, 0}, 0.18, 0.05});
        pert.quad_spacing = 0.18 / 6;
        GreenSpec spec;
        spec.k_max = 10;
        const double lambda = 2 * pi;
        const Vec3 dir = {1 / std::sqrt(2.0), 0, 1 / std::sqrt(2.0)};
        auto s = born_scatter(inc, pert, spec,
                              {{5 * lambda * dir[0], 0, 5 * lambda * dir[2]},
                               {50 * lambda * dir[0], 0, 50 * lambda * dir[2]}});
        const double a1 = std::sqrt(norm2(s[0].scattered));
        const double a2 = std::sqrt(norm2(s[1].scattered));
        const double expo = std::log(a2 / a1) / std::log(10.0);
        // linearity
        PerturbationSpec pert2 = pert;
        pert2.bumps[0].amplitude *= 2.0;
        auto s2 = born_scatter(inc, pert2, spec, {{5 * lambda * dir[0], 0, 5 * lambda * dir[2]}});
        const double lin = std::abs(std::sqrt(norm2(s2[0].scattered)) - 2.0 * a1) / (2.0 * a1);
        return {std::abs(expo + 1.0) < 0.02 && lin < 1e-12,
                "falloff exponent " + rel(expo) + ", linearity " + rel(lin)};
    });

    check(rep, "commutator kernel identity", [&]() -> std::pair<bool, std::string> {
        GreenSpec spec;
        spec.n = 1.5;
        spec.k_max = 8.0;
        spec.apod_width = 5.0;
        spec.taper_power = 8;
        const double scale = std::abs(commutator_kernel_via_green(1.0, 0.8, spec));
        double worst = 0.0;
        std::uniform_real_distribution<double> ur(-1.0, 1.0), ut(0.2, 1.2);
        for (int trial = 0; trial < 2; ++trial) {
            const Vec3 dr = {ur(rng), ur(rng), ur(rng)};
            const double dtau = ut(rng);
            const complexd lhs = commutator_kernel(dr, dtau, spec, 96);
            const complexd rhs = commutator_kernel_via_green(norm(dr), dtau, spec);
            worst = std::max(worst, std::abs(lhs - rhs) / scale);
        }
        return {worst < 2e-6, "worst rel-to-scale " + rel(worst)};
    });

    check(rep, "jsa separability and sum-frequency band", [&]() -> std::pair<bool, std::string> {
        PumpSpectrum pump;
        pump.model = PumpSpectrum::Model::monochromatic;
        pump.omega0 = 2.0;
        CrystalSpec crystal;
        crystal.n = 1.5;
        crystal.length = 1e-3;
        crystal.interaction_time = 300.0;
        JsaAxes axes;
        axes.n_omega = 161;
        axes.omega_min = 0.8;
        axes.omega_max = 1.2;
        auto jsa = spdc_jsa(pump, crystal, axes);
        const double band = jsa.mass_within_sum_band(2.0, 2 * pi / 300.0);

        auto g = [](double w) { return std::exp(-25.0 * std::pow(w - 1.0, 2)); };
        JsaAxes small;
        small.n_omega = 32;
        small.omega_min = 0.8;
        small.omega_max = 1.2;
        auto sep = spdc_jsa(pump, crystal, small, [&](double w1, double, double w2, double) {
            return complexd(g(w1) * g(w2), 0.0);
        });
        const double k_sep = schmidt(sep).schmidt_number;

        JsaGrid two(small);
        two.at(5, 20) = 1.0;
        two.at(20, 5) = 1.0;
        two.normalize();
        const double k_two = schmidt(two).schmidt_number;

        const bool ok = band >= 0.99 && std::abs(k_sep - 1.0) <= 1e-6 &&
                        std::abs(k_two - 2.0) <= 1e-6;
        return {ok, "band " + rel(band) + ", K_sep " + rel(k_sep) + ", K_two " + rel(k_two)};
    });

    check(rep, "deterministic evolution", [&]() -> std::pair<bool, std::string> {
        Grid3 g(2, 2, 64, 2, 2, 64);
        auto medium = MediumMap::uniform(g, 0.3, 0.0);
        auto f0 = packet_1d(g, 24, 6, 2 * pi / 8);
        EvolutionConfig cfg;
        cfg.dt = 0.4 * cfl_limit(g, medium);
        cfg.n_steps = 40;
        cfg.snapshot_stride = 0;
        auto a = run(f0, medium, cfg);
        auto b = run(f0, medium, cfg);
        bool identical = true;
        for (int c = 0; c < 3 && identical; ++c)
            for (std::int64_t i = 0; i < g.size(); ++i)
                if (a.final_state.E.comp[c][i] != b.final_state.E.comp[c][i] ||
                    a.final_state.B.comp[c][i] != b.final_state.B.comp[c][i]) {
                    identical = false;
                    break;
                }
        return {identical, identical ? "bitwise equal" : "mismatch"};
    });

    rep.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

} // namespace pwf
