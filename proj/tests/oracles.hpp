#pragma once

// Test-side oracles, independent of the implementation paths they check.

#include <Eigen/Dense>

#include "pwf/spdc.hpp"

namespace pwf::testing {

/// Measure-weighted amplitude matrix of a two-photon grid.
inline Eigen::MatrixXcd weighted_matrix(const JsaGrid& jsa) {
    const int n = jsa.axes.per_photon();
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = jsa.at(i, j) * jsa.axes.cell() *
                      std::sqrt(jsa.axes.node_weight(i) * jsa.axes.node_weight(j));
    return m;
}

/// Schmidt number via the one-photon reduced density matrix: eigenvalues of
/// rho = M M^dagger (self-adjoint route, no SVD).
inline double schmidt_number_density_matrix(const JsaGrid& jsa) {
    Eigen::MatrixXcd m = weighted_matrix(jsa);
    Eigen::MatrixXcd rho = m * m.adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    const int n = static_cast<int>(rho.rows());
    double total = 0.0, purity = 0.0;
    for (int i = 0; i < n; ++i) total += std::max(0.0, es.eigenvalues()(i));
    for (int i = 0; i < n; ++i) {
        const double lam = std::max(0.0, es.eigenvalues()(i)) / total;
        purity += lam * lam;
    }
    return 1.0 / purity;
}

/// Brute-force Schmidt number from density-matrix traces,
/// K = (tr rho)^2 / tr(rho^2); no decomposition at all. Cheap enough for
/// refined grids.
inline double schmidt_number_trace(const JsaGrid& jsa) {
    Eigen::MatrixXcd m = weighted_matrix(jsa);
    Eigen::MatrixXcd rho = m * m.adjoint();
    const double tr = rho.trace().real();
    return tr * tr / rho.squaredNorm();
}

} // namespace pwf::testing
