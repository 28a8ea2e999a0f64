#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "pwf/born.hpp"

using namespace pwf;

namespace {

double cnorm(const CVec3& v) { return std::sqrt(norm2(v)); }

/// Transverse (radiation-zone) part of a complex amplitude at direction rhat.
CVec3 transverse_part(const CVec3& v, const Vec3& rhat) {
    complexd radial = v[0] * rhat[0] + v[1] * rhat[1] + v[2] * rhat[2];
    return {v[0] - radial * rhat[0], v[1] - radial * rhat[1], v[2] - radial * rhat[2]};
}

} // namespace

TEST_CASE("perturbation spec: profile, strength and validation") {
    PerturbationSpec pert;
    pert.bumps.push_back({{0, 0, 0}, 0.5, 0.1});
    pert.quad_spacing = 0.5 / 8;

    CHECK(pert.delta_chi_e({0, 0, 0}) == Catch::Approx(0.1));
    CHECK(pert.delta_chi_e({0.6, 0, 0}) == 0.0);

    // quadrature reproduces the closed-form integrated strength
    double num = 0.0;
    for (const auto& q : pert.quadrature()) num += q.chi * q.volume;
    CHECK(num == Catch::Approx(pert.integrated_strength()).epsilon(2e-4));

    PerturbationSpec bad;
    CHECK_THROWS(bad.validate());
    bad.bumps.push_back({{0, 0, 0}, 1.0, 0.1});
    bad.quad_spacing = 0.9;  // too coarse
    CHECK_THROWS(bad.validate());
}

TEST_CASE("zero perturbation scatters nothing") {
    PlaneWaveIncident inc;
    inc.k = {0, 0, 1.0};
    PerturbationSpec pert;
    pert.bumps.push_back({{0, 0, 0}, 0.4, 0.0});
    pert.quad_spacing = 0.1;
    GreenSpec spec;
    spec.k_max = 10;

    auto out = born_scatter(inc, pert, spec, {{3, 0, 0}, {0, 5, 2}});
    for (const auto& s : out) {
        CHECK(cnorm(s.scattered) == 0.0);
        CHECK(cnorm(s.total()) == Catch::Approx(cnorm(s.incident)));
    }
}

TEST_CASE("Born map is linear in perturbation strength and incident amplitude") {
    PlaneWaveIncident inc;
    inc.k = {0, 0, 1.0};
    GreenSpec spec;
    spec.k_max = 10;

    auto make_pert = [](double amp) {
        PerturbationSpec p;
        p.bumps.push_back({{0.1, -0.2, 0.05}, 0.3, amp});
        p.quad_spacing = 0.3 / 6;
        return p;
    };
    const std::vector<Vec3> obs = {{4, 1, 0.5}, {-2, 3, 6}};

    auto s1 = born_scatter(inc, make_pert(0.02), spec, obs);
    auto s2 = born_scatter(inc, make_pert(0.04), spec, obs);
    for (std::size_t i = 0; i < obs.size(); ++i)
        for (int c = 0; c < 3; ++c)
            CHECK(std::abs(s2[i].scattered[c] - 2.0 * s1[i].scattered[c]) <=
                  1e-12 * cnorm(s1[i].scattered));

    PlaneWaveIncident inc3 = inc;
    inc3.amplitude = 3.0;
    auto s3 = born_scatter(inc3, make_pert(0.02), spec, obs);
    for (std::size_t i = 0; i < obs.size(); ++i)
        for (int c = 0; c < 3; ++c)
            CHECK(std::abs(s3[i].scattered[c] - 3.0 * s1[i].scattered[c]) <=
                  1e-12 * cnorm(s1[i].scattered));
}

TEST_CASE("sub-wavelength bump radiates the analytic dipole pattern") {
    const double w = 1.0;  // vacuum background, lambda = 2 pi
    PlaneWaveIncident inc;
    inc.k = {0, 0, w};

    PerturbationSpec pert;
    const double a = 0.18;  // well sub-wavelength
    pert.bumps.push_back({{0, 0, 0}, a, 0.05});
    pert.quad_spacing = a / 7;

    GreenSpec spec;
    spec.k_max = 20;

    const double lambda = 2 * pi;
    const double alpha = pert.integrated_strength();  // first-order polarizability

    SECTION("angular pattern matches p sin(theta) within 5%") {
        // ring in the x-z plane: angle from the polarization axis x varies
        const double r_obs = 12 * lambda;
        const int n_ang = 24;
        auto ring = observation_ring(r_obs, n_ang, {1, 0, 0}, {0, 0, 1});
        auto out = born_scatter(inc, pert, spec, ring);
        for (int i = 0; i < n_ang; ++i) {
            const double th = 2 * pi * i / n_ang;  // angle from xhat
            const Vec3 rhat = {std::cos(th), 0, std::sin(th)};
            const double want = w * w * alpha * inc.amplitude * std::abs(std::sin(th)) /
                                (4.0 * pi * r_obs);
            const double got = cnorm(transverse_part(out[i].scattered, rhat));
            if (std::abs(std::sin(th)) < 0.3) continue;  // skip near-axis nulls
            CHECK(std::abs(got - want) / want < 0.05);
        }
    }

    SECTION("scattered amplitude scales as omega^2") {
        const Vec3 obs = {8 * lambda, 0, 0};
        auto s1 = born_scatter(inc, pert, spec, {obs});
        PlaneWaveIncident inc2 = inc;
        inc2.k = {0, 0, 2 * w};
        auto s2 = born_scatter(inc2, pert, spec, {obs});
        const double ratio = cnorm(s2[0].scattered) / cnorm(s1[0].scattered);
        CHECK(ratio == Catch::Approx(4.0).epsilon(0.04));
    }

    SECTION("far-field falloff exponent is -1 within 0.02 over a decade") {
        const Vec3 dir = {1 / std::sqrt(2.0), 0, 1 / std::sqrt(2.0)};
        const double r1 = 5 * lambda, r2 = 50 * lambda;
        auto s = born_scatter(inc, pert, spec,
                              {{r1 * dir[0], r1 * dir[1], r1 * dir[2]},
                               {r2 * dir[0], r2 * dir[1], r2 * dir[2]}});
        const double expo = std::log(cnorm(s[1].scattered) / cnorm(s[0].scattered)) /
                            std::log(r2 / r1);
        CHECK(std::abs(expo + 1.0) < 0.02);
    }

    SECTION("observation inside the support is flagged") {
        auto s = born_scatter(inc, pert, spec, {{0, 0, 0}});
        CHECK(s[0].inside_source);
    }
}

TEST_CASE("two identical scatterers interfere with spacing set by d") {
    const double w = 1.0, lambda = 2 * pi;
    PlaneWaveIncident inc;
    inc.k = {0, 0, w};

    const double d = 3.0 * lambda;
    PerturbationSpec pert;
    pert.bumps.push_back({{0, +d / 2, 0}, 0.15, 0.05});
    pert.bumps.push_back({{0, -d / 2, 0}, 0.15, 0.05});
    pert.quad_spacing = 0.15 / 6;

    GreenSpec spec;
    spec.k_max = 20;

    // scan angles in the y-z plane (perpendicular to the polarization)
    const double r_obs = 600 * lambda;  // Fraunhofer zone of the pair
    const int n_ang = 81;
    std::vector<Vec3> obs;
    std::vector<double> sin_th;
    for (int i = 0; i < n_ang; ++i) {
        const double th = -0.35 + 0.7 * i / (n_ang - 1);
        obs.push_back({0, r_obs * std::sin(th), r_obs * std::cos(th)});
        sin_th.push_back(std::sin(th));
    }
    auto out = born_scatter(inc, pert, spec, obs);

    // two-point-source oracle: |cos(k d sin(theta) / 2)| envelope
    double max_amp = 0.0;
    for (const auto& s : out) max_amp = std::max(max_amp, cnorm(s.scattered));
    double max_err = 0.0;
    for (int i = 0; i < n_ang; ++i) {
        const double oracle = std::abs(std::cos(0.5 * w * d * sin_th[i]));
        const double got = cnorm(out[i].scattered) / max_amp;
        max_err = std::max(max_err, std::abs(got - oracle));
    }
    CHECK(max_err < 0.03);

    // fringe spacing: first nulls at sin(theta) = +/- lambda/(2 d)
    const double null_pos = lambda / (2 * d);
    double best = 1e9, best_sin = 0.0;
    for (int i = n_ang / 2; i < n_ang; ++i) {  // positive angles
        const double amp = cnorm(out[i].scattered);
        if (amp < best) {
            best = amp;
            best_sin = sin_th[i];
        }
    }
    CHECK(std::abs(best_sin - null_pos) < 0.02);
}

TEST_CASE("sampled source term") {
    Grid3 g(4, 4, 32, 1, 1, 8);
    PerturbationSpec pert;
    pert.bumps.push_back({{0.5, 0.5, 4.0}, 0.4, 0.2});
    pert.quad_spacing = 0.05;

    SECTION("fewer than three samples is rejected") {
        std::vector<RealFieldPair> two(2, RealFieldPair(g));
        CHECK_THROWS(source_term_e(two, pert, 0.1));
    }

    SECTION("static fields reduce to the grad-div term") {
        RealFieldPair f(g);
        const double k = 2 * pi * 2 / g.Lz;
        for (int ix = 0; ix < g.nx; ++ix)
            for (int iy = 0; iy < g.ny; ++iy)
                for (int iz = 0; iz < g.nz; ++iz)
                    f.E.comp[2][g.index(ix, iy, iz)] = std::sin(k * g.z(iz));
        std::vector<RealFieldPair> hist(3, f);
        auto st = source_term_e(hist, pert, 0.1);
        REQUIRE(st.f_e.size() == 1);
        // -grad(div E) = +k^2 sin(k z) zhat
        for (int iz = 0; iz < g.nz; ++iz) {
            const double want = k * k * std::sin(k * g.z(iz));
            CHECK(st.f_e[0].comp[2][g.index(0, 0, iz)] == Catch::Approx(want).margin(1e-10));
            CHECK(std::abs(st.f_e[0].comp[0][g.index(0, 0, iz)]) < 1e-12);
        }
    }

    SECTION("monochromatic history matches the phasor source inside the bump") {
        const double w = 2 * pi * 3 / g.Lz;  // transverse wave along z
        const double dt = 0.02;              // w dt = 0.047
        std::vector<RealFieldPair> hist;
        for (int j = 0; j < 3; ++j) {
            RealFieldPair f(g, j * dt);
            for (int ix = 0; ix < g.nx; ++ix)
                for (int iy = 0; iy < g.ny; ++iy)
                    for (int iz = 0; iz < g.nz; ++iz)
                        f.E.comp[0][g.index(ix, iy, iz)] =
                            std::cos(w * (g.z(iz) - c_internal * f.t));
            hist.push_back(std::move(f));
        }
        auto st = source_term_e(hist, pert, dt);
        // f_e = mu0 eps0 chi w^2 E at the center snapshot, up to O((w dt)^2)
        const Vec3 rc = {0.5, 0.5, 4.0};
        (void)rc;
        for (int iz = 12; iz < 20; ++iz) {
            const std::int64_t i = g.index(0, 0, 16);
            (void)i;
            const Vec3 r = {g.x(0), g.y(0), g.z(iz)};
            const double chi = pert.delta_chi_e(r);
            if (chi < 0.01) continue;
            const double want =
                chi * w * w * std::cos(w * (g.z(iz) - c_internal * hist[1].t));
            const double got = st.f_e[0].comp[0][g.index(0, 0, iz)];
            CHECK(got == Catch::Approx(want).epsilon(5e-4).margin(1e-9));
        }
    }
}
