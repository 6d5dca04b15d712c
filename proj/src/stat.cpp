#include "cpd/stat.hpp"

#include <cmath>

#include "cpd/errors.hpp"
#include "cpd/quadrature.hpp"

namespace cpd {

namespace {

void check_range(std::size_t n1, std::size_t n2, std::size_t N) {
    if (n1 < 1 || n1 > n2 || n2 > N) {
        throw BadRangeError("index range must satisfy 1 <= n1 <= n2 <= N");
    }
}

} // namespace

Matrix partial_gram(const Matrix& x, std::size_t n1, std::size_t n2) {
    check_range(n1, n2, x.cols());
    const std::size_t k = x.rows();
    Matrix g(k, k);
    for (std::size_t n = n1; n <= n2; ++n) {
        for (std::size_t i = 0; i < k; ++i) {
            const double xi = x(i, n - 1);
            for (std::size_t j = 0; j < k; ++j) {
                g(i, j) += xi * x(j, n - 1);
            }
        }
    }
    return g;
}

Matrix cross_moment(const Matrix& x, const Matrix& y, std::size_t n1, std::size_t n2) {
    if (x.cols() != y.cols()) {
        throw DimMismatchError("cross_moment: X and Y must share N");
    }
    check_range(n1, n2, x.cols());
    const std::size_t k = x.rows();
    const std::size_t m = y.rows();
    Matrix z(k, m);
    for (std::size_t n = n1; n <= n2; ++n) {
        for (std::size_t i = 0; i < k; ++i) {
            const double xi = x(i, n - 1);
            for (std::size_t j = 0; j < m; ++j) {
                z(i, j) += xi * y(j, n - 1);
            }
        }
    }
    return z;
}

Matrix z_statistic(const Matrix& x, const Matrix& y, std::size_t n) {
    if (x.cols() != y.cols()) {
        throw DimMismatchError("z_statistic: X and Y must share N");
    }
    const std::size_t N = x.cols();
    check_range(n, n, N);
    if (n == N) {
        // Algebraic identity: Z(1,N) - P(1,N) P(1,N)^{-1} Z(1,N) = 0.
        return Matrix(x.rows(), y.rows());
    }
    const Matrix gram_full = partial_gram(x, 1, N);
    const Matrix w = solve(gram_full, cross_moment(x, y, 1, N)); // P(1,N)^{-1} Z(1,N)
    Matrix z = cross_moment(x, y, 1, n) - multiply(partial_gram(x, 1, n), w);
    z *= 1.0 / static_cast<double>(N);
    return z;
}

StatProfile profile(const Matrix& x, const Matrix& y, double beta, double alpha) {
    if (x.cols() != y.cols()) {
        throw DimMismatchError("profile: X and Y must share N");
    }
    if (!(beta >= 0.0 && beta < alpha && alpha <= 1.0)) {
        throw BadRangeError("profile: need 0 <= beta < alpha <= 1");
    }
    const std::size_t N = x.cols();
    const std::size_t k = x.rows();
    const std::size_t m = y.rows();
    const std::size_t lo = grid_index(beta, N);
    const std::size_t hi = grid_index(alpha, N);
    if (lo < 1) {
        throw EmptyWindowError("profile: [beta N] must be at least 1");
    }
    if (hi < lo) {
        throw EmptyWindowError("profile: window is empty");
    }

    const Matrix w = solve(partial_gram(x, 1, N), cross_moment(x, y, 1, N));
    const double inv_n = 1.0 / static_cast<double>(N);

    StatProfile prof;
    prof.window_lo = lo;
    prof.window_hi = hi;
    prof.values.reserve(hi - lo + 1);

    // Z(1,n) - P(1,n) W telescopes into a prefix sum of X_i r_i^T with
    // r_i = Y(i) - W^T X(i), the full-sample-fit residual: one pass,
    // O(N K (K + M)) total.
    Matrix resid_sum(k, m);
    std::vector<double> resid(m);
    std::size_t best = lo;
    double best_val = -1.0;
    for (std::size_t n = 1; n <= hi; ++n) {
        for (std::size_t j = 0; j < m; ++j) {
            double r = y(j, n - 1);
            for (std::size_t l = 0; l < k; ++l) {
                r -= x(l, n - 1) * w(l, j);
            }
            resid[j] = r;
        }
        for (std::size_t i = 0; i < k; ++i) {
            const double xi = x(i, n - 1);
            for (std::size_t j = 0; j < m; ++j) {
                resid_sum(i, j) += xi * resid[j];
            }
        }
        if (n < lo) {
            continue;
        }
        double norm_sq = 0.0;
        if (n == N) {
            // exact zero at the right endpoint (projection identity)
        } else {
            for (double v : resid_sum.entries()) {
                norm_sq += v * inv_n * (v * inv_n);
            }
        }
        const double value = std::sqrt(norm_sq);
        prof.values.push_back(value);
        if (value > best_val) {
            best_val = value;
            best = n;
        }
    }
    prof.argmax_index = best;
    prof.max_value = best_val;
    prof.theta_hat = static_cast<double>(best) / static_cast<double>(N);
    return prof;
}

StatProfile profile(const Sample& sample, double beta, double alpha) {
    return profile(sample.X, sample.Y, beta, alpha);
}

namespace {

constexpr std::size_t kMeanPanels = 2048;

struct SingleChange {
    double theta;
    Matrix diff_t; // (a - b)^T, K x M
};

SingleChange extract_single_change(const PiecewiseCoefficients& coeffs) {
    if (coeffs.segments.size() != 2) {
        throw ConfigError("limit mean: exactly two coefficient segments required");
    }
    const Matrix diff = coeffs.segments[0].coeff - coeffs.segments[1].coeff;
    return SingleChange{coeffs.segments[0].theta, transpose(diff)};
}

Matrix integral_matrix(const std::function<Matrix(double)>& f, double t, std::size_t k) {
    // Entry-wise Simpson of a matrix-valued function over [0, t].
    Matrix out(k, k);
    if (t <= 0.0) {
        return out;
    }
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            out(i, j) = simpson([&](double s) { return f(s)(i, j); }, 0.0, t, kMeanPanels);
        }
    }
    return out;
}

Matrix limit_mean_from_integral(const std::function<Matrix(double)>& cum, double t,
                                const SingleChange& change) {
    const Matrix a_t = cum(t);
    const Matrix a_theta = cum(change.theta);
    const Matrix eye = cum(1.0);
    if (t <= change.theta) {
        // A(t) I^{-1} (I - A(theta)) (a-b)^T
        return multiply(a_t, solve(eye, multiply(eye - a_theta, change.diff_t)));
    }
    // (I - A(t)) I^{-1} A(theta) (a-b)^T
    return multiply(eye - a_t, solve(eye, multiply(a_theta, change.diff_t)));
}

} // namespace

Matrix limit_mean_deterministic(const RegressionPlan& plan, const PiecewiseCoefficients& coeffs,
                                double t) {
    if (plan.kind != RegressionPlan::Kind::Deterministic) {
        throw WrongKindError("limit_mean_deterministic: plan is not deterministic");
    }
    const SingleChange change = extract_single_change(coeffs);
    const std::size_t k = plan.functions.size();
    auto outer = [&plan, k](double s) {
        Matrix ff(k, k);
        for (std::size_t i = 0; i < k; ++i) {
            const double fi = plan.functions[i](s);
            for (std::size_t j = 0; j < k; ++j) {
                ff(i, j) = fi * plan.functions[j](s);
            }
        }
        return ff;
    };
    auto cum = [&outer, k](double upper) { return integral_matrix(outer, upper, k); };
    return limit_mean_from_integral(cum, t, change);
}

Matrix limit_mean_stochastic(const std::function<Matrix(double)>& v,
                             const PiecewiseCoefficients& coeffs, double t) {
    const SingleChange change = extract_single_change(coeffs);
    const std::size_t k = coeffs.predictor_count();
    auto cum = [&v, k](double upper) { return integral_matrix(v, upper, k); };
    return limit_mean_from_integral(cum, t, change);
}

} // namespace cpd
