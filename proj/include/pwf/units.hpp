#pragma once

#include <cmath>

#include "pwf/common.hpp"

namespace pwf {

/// Conversion between SI and the internal natural units (c = eps0 = mu0 =
/// hbar = 1). A single length scale pins every other conversion factor:
/// time follows from c, energy from hbar.
class UnitSystem {
  public:
    static constexpr double c_si = 299792458.0;          // m/s
    static constexpr double hbar_si = 1.054571817e-34;   // J s
    static constexpr double eps0_si = 8.8541878128e-12;  // F/m

    explicit UnitSystem(double length_scale_m = 1.0e-6) : length_m_(length_scale_m) {
        if (!(length_scale_m > 0.0) || !std::isfinite(length_scale_m))
            fail("UnitSystem: length scale must be positive and finite");
    }

    double length_scale_m() const { return length_m_; }
    double time_scale_s() const { return length_m_ / c_si; }
    double energy_scale_j() const { return hbar_si / time_scale_s(); }

    double length_to_si(double x) const { return x * length_m_; }
    double length_from_si(double x) const { return x / length_m_; }

    double time_to_si(double t) const { return t * time_scale_s(); }
    double time_from_si(double t) const { return t / time_scale_s(); }

    // Angular frequency and wavevector are inverse time / inverse length.
    double angular_frequency_to_si(double w) const { return w / time_scale_s(); }
    double angular_frequency_from_si(double w) const { return w * time_scale_s(); }
    double wavevector_to_si(double k) const { return k / length_m_; }
    double wavevector_from_si(double k) const { return k * length_m_; }

    double energy_to_si(double e) const { return e * energy_scale_j(); }
    double energy_from_si(double e) const { return e / energy_scale_j(); }

  private:
    double length_m_;
};

} // namespace pwf
