#pragma once

#include <cmath>

#include "pwf/common.hpp"
#include "pwf/field.hpp"

namespace pwf {

/// Linear, non-dispersive, non-absorptive medium: real susceptibility maps
/// chi_e(r), chi_m(r) on the grid. Derived quantities use
///   eps = (1 + chi_e) eps0,  mu = (1 + chi_m) mu0,  n = sqrt((1+chi_e)(1+chi_m)).
class MediumMap {
  public:
    MediumMap() = default;

    MediumMap(RealScalarField chi_e, RealScalarField chi_m)
        : chi_e_(std::move(chi_e)), chi_m_(std::move(chi_m)) {
        if (chi_e_.grid != chi_m_.grid) fail("MediumMap: chi_e/chi_m grid mismatch");
        validate();
        classify();
    }

    static MediumMap vacuum(const Grid3& g) {
        return MediumMap(RealScalarField(g, 0.0), RealScalarField(g, 0.0));
    }
    static MediumMap uniform(const Grid3& g, double chi_e, double chi_m = 0.0) {
        return MediumMap(RealScalarField(g, chi_e), RealScalarField(g, chi_m));
    }

    const Grid3& grid() const { return chi_e_.grid; }
    const RealScalarField& chi_e() const { return chi_e_; }
    const RealScalarField& chi_m() const { return chi_m_; }

    double eps(std::int64_t i) const { return (1.0 + chi_e_.values[i]) * eps0_internal; }
    double mu(std::int64_t i) const { return (1.0 + chi_m_.values[i]) * mu0_internal; }
    double n(std::int64_t i) const {
        return std::sqrt((1.0 + chi_e_.values[i]) * (1.0 + chi_m_.values[i]));
    }

    bool is_vacuum() const { return vacuum_; }
    bool is_uniform() const { return uniform_; }

    /// Uniform-medium accessors; reject use on spatially varying maps.
    double uniform_chi_e() const {
        require_uniform();
        return chi_e_.values[0];
    }
    double uniform_chi_m() const {
        require_uniform();
        return chi_m_.values[0];
    }
    double uniform_n() const {
        require_uniform();
        return n(0);
    }

    double min_n() const {
        double m = n(0);
        for (std::int64_t i = 1; i < grid().size(); ++i) m = std::min(m, n(i));
        return m;
    }
    double max_n() const {
        double m = n(0);
        for (std::int64_t i = 1; i < grid().size(); ++i) m = std::max(m, n(i));
        return m;
    }

  private:
    void validate() const {
        for (std::int64_t i = 0; i < chi_e_.grid.size(); ++i) {
            const double ce = chi_e_.values[i], cm = chi_m_.values[i];
            if (!std::isfinite(ce) || !std::isfinite(cm))
                fail("MediumMap: non-finite susceptibility");
            if (!(1.0 + ce > 0.0) || !(1.0 + cm > 0.0))
                fail("MediumMap: 1 + chi must stay positive");
        }
    }
    void classify() {
        uniform_ = true;
        vacuum_ = true;
        const double ce0 = chi_e_.values[0], cm0 = chi_m_.values[0];
        for (std::int64_t i = 0; i < chi_e_.grid.size(); ++i) {
            if (chi_e_.values[i] != ce0 || chi_m_.values[i] != cm0) uniform_ = false;
            if (chi_e_.values[i] != 0.0 || chi_m_.values[i] != 0.0) vacuum_ = false;
            if (!uniform_ && !vacuum_) break;
        }
    }
    void require_uniform() const {
        if (!uniform_) fail("MediumMap: operation requires a uniform medium");
    }

    RealScalarField chi_e_, chi_m_;
    bool uniform_ = true, vacuum_ = true;
};

} // namespace pwf
