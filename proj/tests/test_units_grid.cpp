#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "pwf/fft.hpp"
#include "pwf/grid.hpp"
#include "pwf/units.hpp"

using namespace pwf;

TEST_CASE("unit conversions round trip at 1 ulp scale") {
    UnitSystem u(0.8e-6);
    const double vals[] = {1.0, 3.14159, 1e-9, 2.5e11, 7.77e-23};
    for (double v : vals) {
        CHECK(std::abs(u.length_from_si(u.length_to_si(v)) - v) <= 1e-14 * std::abs(v));
        CHECK(std::abs(u.time_from_si(u.time_to_si(v)) - v) <= 1e-14 * std::abs(v));
        CHECK(std::abs(u.energy_from_si(u.energy_to_si(v)) - v) <= 1e-14 * std::abs(v));
        CHECK(std::abs(u.angular_frequency_from_si(u.angular_frequency_to_si(v)) - v) <=
              1e-14 * std::abs(v));
        CHECK(std::abs(u.wavevector_from_si(u.wavevector_to_si(v)) - v) <= 1e-14 * std::abs(v));
    }
    // c^2 = 1/(eps0 mu0) holds identically in internal units.
    CHECK(c_internal * c_internal * eps0_internal * mu0_internal == 1.0);
    CHECK_THROWS(UnitSystem(0.0));
}

TEST_CASE("grid invariants") {
    CHECK_THROWS(Grid3(1, 4, 4, 1, 1, 1));
    CHECK_THROWS(Grid3(4, 4, 4, 0, 1, 1));

    Grid3 g(8, 6, 4, 2.0, 3.0, 1.0);
    CHECK(g.size() == 8 * 6 * 4);
    CHECK(g.index(0, 0, 1) == 1);          // z fastest
    CHECK(g.index(0, 1, 0) == 4);
    CHECK(g.index(1, 0, 0) == 24);
    CHECK(g.dx() == Catch::Approx(0.25));
    CHECK(g.k_cell_volume() ==
          Catch::Approx((2 * pi / 2.0) * (2 * pi / 3.0) * (2 * pi / 1.0)));
}

TEST_CASE("wavevector lattice is the exact discrete Fourier dual") {
    Grid3 g(8, 4, 6, 1.7, 2.3, 0.9);
    // A single lattice mode transforms to a delta at its own index.
    const int mx = 3, my = 1, mz = 4;  // mz=4 maps to negative frequency branch
    ComplexVectorField f(g);
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy)
            for (int iz = 0; iz < g.nz; ++iz) {
                const double phase = 2 * pi *
                    (double(mx * ix) / g.nx + double(my * iy) / g.ny + double(mz * iz) / g.nz);
                f.comp[0][g.index(ix, iy, iz)] = std::exp(iunit * phase);
            }
    fft_forward(f);
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy)
            for (int iz = 0; iz < g.nz; ++iz) {
                const complexd v = f.comp[0][g.index(ix, iy, iz)];
                if (ix == mx && iy == my && iz == mz)
                    CHECK(std::abs(v - 1.0) < 1e-12);
                else
                    CHECK(std::abs(v) < 1e-12);
            }
    // The stored wavevector matches 2*pi*mode/L with the FFT sign convention.
    CHECK(g.kx(3) == Catch::Approx(2 * pi * 3 / 1.7));
    CHECK(g.kz(4) == Catch::Approx(2 * pi * (4 - 6) / 0.9));
}

TEST_CASE("fft round trip and Parseval") {
    Grid3 g(6, 6, 6, 1, 1, 1);
    ComplexVectorField f(g);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1, 1);
    for (auto& c : f.comp)
        for (auto& v : c) v = complexd(u(rng), u(rng));

    const double before = f.l2_norm2();
    ComplexVectorField spec = f;
    fft_forward(spec);
    double mode_sum = 0.0;
    for (auto& c : spec.comp)
        for (auto& v : c) mode_sum += std::norm(v);
    // integral |f|^2 = V * sum_k |F_k|^2 under the mode-coefficient convention
    CHECK(mode_sum * g.volume() == Catch::Approx(before).epsilon(1e-12));

    fft_inverse(spec);
    CHECK(relative_rms_diff(spec, f) < 1e-13);
}
