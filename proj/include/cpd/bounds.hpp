#pragma once

#include <functional>
#include <vector>

#include "cpd/matrix.hpp"
#include "cpd/model.hpp"

namespace cpd {

/// Divergence rate functions of one change: j0(t) is the divergence of the
/// pre-change law from the post-change law at relative time t (expectation
/// under the pre-change regime) and j1(t) the mirrored one. Both in nats.
struct KlPair {
    std::function<double(double)> j0;
    std::function<double(double)> j1;
};

/// Exponent e of the estimation-error lower bound P >= exp(-N e) (1 - o(1))
/// for a single change at theta:
///   e = min( int_theta^{theta+eps} j0 dt, int_{theta-eps}^theta j1 dt ).
/// Simpson quadrature with 1024 panels per flank.
double theorem1_exponent(const KlPair& kl, double theta, double eps);

/// Break in the trend of unit-variance Gaussian observations:
/// J0 = J1 = (phi0 - phi1)^2 / 2.
KlPair kl_gaussian_trend(std::function<double(double)> phi0, std::function<double(double)> phi1);

/// Deterministic-plan Gaussian regression with coefficient change a -> b:
/// J0 = J1 = (sum_i f_i(t) (a_i - b_i))^2 / (2 sigma^2).
KlPair kl_gaussian_regression(const std::vector<PlanFunction>& plan, const Vector& a,
                              const Vector& b, double sigma);

/// Noise-free stochastic regression with independent Gaussian predictors
/// x_i ~ N(f_i(t), sigma_i^2(t)): the response is Gaussian with mean
/// phi_r(t) = sum_i c_i f_i(t) and variance Delta_r^2(t) = sum_i c_i^2
/// sigma_i^2(t) under regime r, so j0/j1 are the exact one-dimensional
/// Gaussian divergences between the two response laws. Throws
/// DegenerateVarianceError when either variance vanishes.
KlPair kl_gaussian_stochastic(const std::vector<PlanFunction>& mean_fns,
                              const std::vector<PlanFunction>& sd_fns, const Vector& a,
                              const Vector& b);

/// Multi-change exponent: the minimum over changes of the single-change
/// double-min, each change i described by kls[i] at location thetas[i].
double theorem2_exponent(const std::vector<KlPair>& kls, const std::vector<double>& thetas,
                         double eps);

} // namespace cpd
