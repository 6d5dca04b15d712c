#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "cpd/matrix.hpp"
#include "cpd/model.hpp"

namespace cpd {

/// Norm profile of the projection-residual statistic over a search window.
/// `values[j]` is the (unsquared) Frobenius norm at sample index
/// window_lo + j; the argmax ties break toward the smallest index.
struct StatProfile {
    std::size_t window_lo = 0; // 1-based sample indices
    std::size_t window_hi = 0;
    std::vector<double> values;
    std::size_t argmax_index = 0;
    double max_value = 0.0;
    double theta_hat = 0.0; // argmax_index / N
};

/// Sum over i = n1..n2 (1-based, inclusive) of X(i) X(i)^T. K x K.
Matrix partial_gram(const Matrix& x, std::size_t n1, std::size_t n2);

/// Sum over i = n1..n2 of X(i) Y(i)^T. K x M.
Matrix cross_moment(const Matrix& x, const Matrix& y, std::size_t n1, std::size_t n2);

/// The K x M statistic at index n:
///   Z_N(n) = N^{-1} ( Z(1,n) - P(1,n) P(1,N)^{-1} Z(1,N) )
/// where P is the predictor gram and Z the predictor/response cross moment.
/// One formula serves deterministic and stochastic plans; the projection makes
/// the value identically zero at n = N and for any exact linear relation.
Matrix z_statistic(const Matrix& x, const Matrix& y, std::size_t n);

/// Full norm profile over the window [ [beta N], [alpha N] ], computed with
/// running prefix sums (O(N K (K+M)), left-to-right, bit-stable order).
StatProfile profile(const Matrix& x, const Matrix& y, double beta, double alpha);

StatProfile profile(const Sample& sample, double beta, double alpha);

/// Limit mean m(t) of the statistic for a deterministic plan with a single
/// coefficient change at theta:
///   m(t) = A(t) I^{-1} (I - A(theta)) (a - b)^T      for t <= theta
///          (I - A(t)) I^{-1} A(theta) (a - b)^T      for t >  theta
/// with A(t) the integral of F F^T over [0, t] (Simpson, 2048 panels).
Matrix limit_mean_deterministic(const RegressionPlan& plan, const PiecewiseCoefficients& coeffs,
                                double t);

/// Same shape for stochastic plans, with R(t) = integral of V(s) ds in place
/// of A(t). V is the K x K second-moment matrix function of the predictors.
Matrix limit_mean_stochastic(const std::function<Matrix(double)>& v,
                             const PiecewiseCoefficients& coeffs, double t);

} // namespace cpd
