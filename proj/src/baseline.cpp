#include "cpd/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cpd/errors.hpp"
#include "cpd/model.hpp"
#include "cpd/stat.hpp"

namespace cpd {

namespace {

double response_energy(const Matrix& y, std::size_t n1, std::size_t n2) {
    double q = 0.0;
    for (std::size_t n = n1; n <= n2; ++n) {
        for (std::size_t r = 0; r < y.rows(); ++r) {
            q += y(r, n - 1) * y(r, n - 1);
        }
    }
    return q;
}

// rss = energy - tr(H^T G^{-1} H); clamped at zero against roundoff.
double rss_from_moments(const Matrix& gram, const Matrix& cross, double energy) {
    const Matrix w = solve_spd(gram, cross);
    double fitted = 0.0;
    for (std::size_t i = 0; i < cross.rows(); ++i) {
        for (std::size_t j = 0; j < cross.cols(); ++j) {
            fitted += cross(i, j) * w(i, j);
        }
    }
    return std::max(0.0, energy - fitted);
}

} // namespace

OlsFit ols_fit(const Matrix& x, const Matrix& y) {
    if (x.cols() != y.cols()) {
        throw DimMismatchError("ols_fit: X and Y must share the observation count");
    }
    const std::size_t n = x.cols();
    const std::size_t k = x.rows();
    if (n < k) {
        throw SingularMatrixError("ols_fit: fewer observations than predictors");
    }
    const Matrix gram = partial_gram(x, 1, n);
    const Matrix cross = cross_moment(x, y, 1, n);
    const Matrix w = solve_spd(gram, cross); // K x M
    OlsFit fit;
    fit.coeffs = transpose(w);
    fit.n_obs = n;
    double fitted = 0.0;
    for (std::size_t i = 0; i < cross.rows(); ++i) {
        for (std::size_t j = 0; j < cross.cols(); ++j) {
            fitted += cross(i, j) * w(i, j);
        }
    }
    fit.rss = std::max(0.0, response_energy(y, 1, n) - fitted);
    return fit;
}

SupWaldResult sup_wald(const Matrix& x, const Matrix& y, double beta, double alpha) {
    if (x.cols() != y.cols()) {
        throw DimMismatchError("sup_wald: X and Y must share the observation count");
    }
    if (!(beta >= 0.0 && beta < alpha && alpha <= 1.0)) {
        throw BadRangeError("sup_wald: need 0 <= beta < alpha <= 1");
    }
    const std::size_t n_total = x.cols();
    const std::size_t k = x.rows();
    const std::size_t m = y.rows();

    const std::size_t lo = std::max<std::size_t>(grid_index(beta, n_total), k + 1);
    const std::size_t hi =
        std::min<std::size_t>(grid_index(alpha, n_total), n_total >= k + 1 ? n_total - k - 1 : 0);
    if (lo > hi) {
        throw EmptyWindowError("sup_wald: no feasible split leaves K+1 observations per side");
    }

    const Matrix gram_total = partial_gram(x, 1, n_total);
    const Matrix cross_total = cross_moment(x, y, 1, n_total);
    const double energy_total = response_energy(y, 1, n_total);
    const double pooled_rss = rss_from_moments(gram_total, cross_total, energy_total);
    const double degenerate_floor = 1e-12 * std::max(energy_total, 1e-300);

    SupWaldResult result;
    result.sup_w = -1.0;

    Matrix gram(k, k);
    Matrix cross(k, m);
    double energy = 0.0;
    for (std::size_t split = 1; split <= hi; ++split) {
        for (std::size_t i = 0; i < k; ++i) {
            const double xi = x(i, split - 1);
            for (std::size_t j = 0; j < k; ++j) {
                gram(i, j) += xi * x(j, split - 1);
            }
            for (std::size_t j = 0; j < m; ++j) {
                cross(i, j) += xi * y(j, split - 1);
            }
        }
        energy += response_energy(y, split, split);
        if (split < lo) {
            continue;
        }

        double s1 = 0.0;
        double s2 = 0.0;
        try {
            s1 = rss_from_moments(gram, cross, energy);
            s2 = rss_from_moments(gram_total - gram, cross_total - cross, energy_total - energy);
        } catch (const SingularMatrixError&) {
            ++result.skipped_splits;
            continue;
        }

        const double denom = s1 + s2;
        if (denom <= degenerate_floor) {
            // Perfectly fit pieces: the ratio diverges, report +infinity here.
            result.sup_w = std::numeric_limits<double>::infinity();
            result.n0 = split;
            result.theta_hat = static_cast<double>(split) / static_cast<double>(n_total);
            result.degenerate = true;
            return result;
        }
        const double w =
            static_cast<double>(n_total) * std::max(0.0, pooled_rss - denom) / denom;
        if (w > result.sup_w) {
            result.sup_w = w;
            result.n0 = split;
        }
    }

    if (result.n0 == 0) {
        throw SingularMatrixError("sup_wald: every split in the window was singular");
    }
    result.theta_hat = static_cast<double>(result.n0) / static_cast<double>(n_total);
    return result;
}

} // namespace cpd
