#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "pwf/helicity.hpp"
#include "test_helpers.hpp"

using namespace pwf;
using pwf::testing::plane_mode;

namespace {
double l2_inner_abs(const ComplexVectorField& a, const ComplexVectorField& b) {
    complexd s{};
    for (int c = 0; c < 3; ++c)
        for (std::int64_t i = 0; i < a.grid.size(); ++i)
            s += std::conj(a.comp[c][i]) * b.comp[c][i];
    return std::abs(s) * a.grid.cell_volume();
}
} // namespace

TEST_CASE("helicity basis satisfies i khat x e_s = s e_s") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int trial = 0; trial < 50; ++trial) {
        Vec3 k = {u(rng), u(rng), u(rng)};
        if (norm(k) < 1e-3) continue;
        const auto b = helicity_basis(k);
        const CVec3 ep = b.e_plus(), em = b.e_minus();
        const CVec3 kh = {b.khat[0], b.khat[1], b.khat[2]};
        const CVec3 sp = cross(kh, ep), sm = cross(kh, em);
        for (int c = 0; c < 3; ++c) {
            CHECK(std::abs(iunit * sp[c] - ep[c]) < 1e-14);
            CHECK(std::abs(iunit * sm[c] + em[c]) < 1e-14);
        }
        CHECK(std::abs(cdot(ep, em)) < 1e-14);
        CHECK(std::abs(norm2(ep) - 1.0) < 1e-14);
    }
    // pinned basis for k along zhat
    const auto b = helicity_basis({0, 0, 2.0});
    CHECK(std::abs(b.e_plus()[0] - complexd(1 / std::sqrt(2.0), 0)) < 1e-15);
    CHECK(std::abs(b.e_plus()[1] - complexd(0, 1 / std::sqrt(2.0))) < 1e-15);
}

TEST_CASE("helicity projection of a pure eigenmode returns it unchanged") {
    Grid3 g(8, 8, 8, 1, 1, 1);
    const Vec3 k = {2 * pi * 2 / g.Lx, -2 * pi / g.Ly, 2 * pi * 3 / g.Lz};
    const auto basis = helicity_basis(k);
    auto f = plane_mode(g, basis.e_plus(), k);

    auto split = helicity_project(f);
    CHECK(relative_rms_diff(split.plus, f) < 1e-12);
    CHECK(split.minus.rms() < 1e-12 * f.rms());
    CHECK(split.longitudinal.rms() < 1e-12 * f.rms());
}

TEST_CASE("linear polarization splits evenly between helicities") {
    // xhat e^{ikz} with k along zhat: amplitude 1/sqrt(2) in each of e_plus,
    // e_minus; projections are e_s e^{ikz}/sqrt(2).
    Grid3 g(4, 4, 16, 1, 1, 2);
    const Vec3 k = {0, 0, 2 * pi * 3 / g.Lz};
    auto f = plane_mode(g, {1.0, 0.0, 0.0}, k);

    auto split = helicity_project(f);
    const auto basis = helicity_basis(k);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    auto expect_p = plane_mode(g,
                               {basis.e_plus()[0] * inv_sqrt2, basis.e_plus()[1] * inv_sqrt2,
                                basis.e_plus()[2] * inv_sqrt2},
                               k);
    auto expect_m = plane_mode(g,
                               {basis.e_minus()[0] * inv_sqrt2, basis.e_minus()[1] * inv_sqrt2,
                                basis.e_minus()[2] * inv_sqrt2},
                               k);
    CHECK(relative_rms_diff(split.plus, expect_p) < 1e-12);
    CHECK(relative_rms_diff(split.minus, expect_m) < 1e-12);
    CHECK(split.longitudinal.rms() < 1e-13);
}

TEST_CASE("longitudinal mode goes entirely to the longitudinal output") {
    Grid3 g(4, 4, 16, 1, 1, 2);
    const Vec3 k = {0, 0, 2 * pi * 2 / g.Lz};
    auto f = plane_mode(g, {0.0, 0.0, 1.0}, k);
    auto split = helicity_project(f);
    CHECK(split.plus.rms() < 1e-13);
    CHECK(split.minus.rms() < 1e-13);
    CHECK(relative_rms_diff(split.longitudinal, f) < 1e-12);
}

TEST_CASE("k = 0 content is assigned to the longitudinal output") {
    Grid3 g(4, 4, 4, 1, 1, 1);
    ComplexVectorField f(g);
    for (auto& v : f.comp[1]) v = complexd(0.7, -0.2);
    auto split = helicity_project(f);
    CHECK(split.plus.rms() < 1e-14);
    CHECK(split.minus.rms() < 1e-14);
    CHECK(relative_rms_diff(split.longitudinal, f) < 1e-13);
}

TEST_CASE("projection decomposes exactly, idempotently and orthogonally") {
    Grid3 g(8, 8, 8, 1.3, 0.9, 1.1);
    ComplexVectorField f(g);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    for (auto& c : f.comp)
        for (auto& v : c) v = complexd(u(rng), u(rng));

    auto split = helicity_project(f);

    // exact reassembly
    auto sum = split.plus + split.minus + split.longitudinal;
    CHECK(relative_rms_diff(sum, f) < 1e-13);

    // idempotence
    auto again = helicity_project(split.plus);
    CHECK(relative_rms_diff(again.plus, split.plus) < 1e-12);
    CHECK(again.minus.rms() < 1e-12 * split.plus.rms());
    CHECK(again.longitudinal.rms() < 1e-12 * split.plus.rms());

    // mutual L2 orthogonality
    const double scale = f.l2_norm2();
    CHECK(l2_inner_abs(split.plus, split.minus) < 1e-12 * scale);
    CHECK(l2_inner_abs(split.plus, split.longitudinal) < 1e-12 * scale);
    CHECK(l2_inner_abs(split.minus, split.longitudinal) < 1e-12 * scale);

    // transversality of the helicity parts
    CHECK(divergence_rms(split.plus) < 1e-11 * split.plus.rms());
    CHECK(divergence_rms(split.minus) < 1e-11 * split.minus.rms());
}

TEST_CASE("non-finite input is rejected with a located diagnostic") {
    Grid3 g(4, 4, 4, 1, 1, 1);
    ComplexVectorField f(g);
    f.comp[1][17] = complexd(std::numeric_limits<double>::quiet_NaN(), 0.0);
    try {
        helicity_project(f);
        FAIL("expected rejection");
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("component 1") != std::string::npos);
        CHECK(msg.find("17") != std::string::npos);
    }
}

TEST_CASE("sigma squares to the transverse projector") {
    Grid3 g(8, 8, 8, 1, 1, 1);
    std::mt19937_64 rng(5);
    auto s = pwf::testing::random_transverse_state(g, rng);
    auto psi = s.total();
    auto twice = sigma_apply(sigma_apply(psi));
    CHECK(relative_rms_diff(twice, psi) < 1e-12);
}
