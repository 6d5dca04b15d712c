#pragma once

#include <cstddef>

#include "cpd/matrix.hpp"

namespace cpd {

struct OlsFit {
    Matrix coeffs;        // M x K
    double rss = 0.0;     // squared residuals summed over channels
    std::size_t n_obs = 0;
};

/// Least squares over all columns: coeffs minimize sum ||Y(i) - C X(i)||^2.
/// Throws SingularMatrixError for underdetermined or rank-deficient designs.
OlsFit ols_fit(const Matrix& x, const Matrix& y);

struct SupWaldResult {
    double sup_w = 0.0;
    std::size_t n0 = 0;     // split index of the maximum (smallest on ties)
    double theta_hat = 0.0; // n0 / N
    bool degenerate = false;
    std::size_t skipped_splits = 0; // singular fits skipped inside the window
};

/// Split-maximized Wald statistic
///   SupW = max_m N * (S(N) - S1(m) - S2(N-m)) / (S1(m) + S2(N-m))
/// over splits m in [ [beta N], [alpha N] ] trimmed so both sides keep at
/// least K+1 observations. A split with vanishing pooled piecewise residual is
/// reported as degenerate (+infinity) at the first such index. Left and right
/// residual sums come from running prefix/suffix moments, so the whole search
/// costs O(N K^2 (K + M)).
SupWaldResult sup_wald(const Matrix& x, const Matrix& y, double beta, double alpha);

} // namespace cpd
