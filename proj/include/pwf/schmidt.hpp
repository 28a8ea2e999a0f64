#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "pwf/common.hpp"
#include "pwf/spdc.hpp"

namespace pwf {

/// Schmidt spectrum of a bipartite amplitude: descending weights lambda_n
/// summing to one, the Schmidt number K = 1 / sum lambda^2, and the rank
/// kept after discarding numerically zero weights.
struct SchmidtResult {
    std::vector<double> lambdas;
    double schmidt_number = 1.0;
    int truncation_rank = 0;
    double residual = 0.0;  // weight dropped by the truncation

    bool separable(double tol = 1e-6) const { return std::abs(schmidt_number - 1.0) <= tol; }
};

/// Singular-value route: reshape the two-photon amplitude into the
/// (photon 1) x (photon 2) matrix, scaled by the square roots of the grid
/// measure so the discrete singular values converge to the continuum
/// Schmidt coefficients, and take lambda_n from their squares. Requires a
/// unit-norm input.
inline SchmidtResult schmidt(const JsaGrid& jsa) {
    if (!jsa.is_normalized())
        fail("schmidt: input must be normalized to unit L2 norm");
    const int n = jsa.axes.per_photon();
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = jsa.at(i, j) * jsa.axes.cell() *
                      std::sqrt(jsa.axes.node_weight(i) * jsa.axes.node_weight(j));

    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
    const auto& sv = svd.singularValues();

    SchmidtResult out;
    double total = 0.0;
    for (int i = 0; i < sv.size(); ++i) total += sv(i) * sv(i);
    double kept = 0.0, purity = 0.0;
    for (int i = 0; i < sv.size(); ++i) {
        const double lam = sv(i) * sv(i) / total;
        if (lam < 1e-14) break;
        out.lambdas.push_back(lam);
        kept += lam;
        purity += lam * lam;
    }
    out.truncation_rank = static_cast<int>(out.lambdas.size());
    out.residual = std::max(0.0, 1.0 - kept);
    out.schmidt_number = purity > 0.0 ? 1.0 / purity : 1.0;
    return out;
}

} // namespace pwf
