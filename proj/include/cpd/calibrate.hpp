#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cpd/matrix.hpp"
#include "cpd/model.hpp"

namespace cpd {

struct ThresholdEstimate {
    enum class Method { MonteCarlo, Analytic, LimitLaw };

    double level = 0.0;
    double value = 0.0; // unsquared ||Z|| units (LimitLaw: sqrt(N)-scaled, see limit_threshold)
    Method method = Method::MonteCarlo;
    std::size_t trials = 0;
    double stderr_value = 0.0;
};

/// Empirical quantile as the order statistic at ceil(level * n) of the
/// ascending values.
double empirical_quantile(std::vector<double> values, double level);

/// Standard error proxy for an empirical quantile: half the spread of the
/// order statistics one binomial standard deviation around the quantile index.
double quantile_stderr(const std::vector<double>& sorted_values, double level);

/// Monte Carlo threshold: simulates `trials` stationary samples, records each
/// norm-profile maximum over [beta, alpha], and returns the level-quantile.
/// The spec must have a single coefficient segment. Trials run on `workers`
/// threads (0 = hardware choice) with per-trial seed streams, so the result
/// does not depend on the worker count.
ThresholdEstimate mc_threshold(const ModelSpec& stationary_spec, double level, std::size_t trials,
                               double beta, double alpha, std::uint64_t seed,
                               std::size_t workers = 0);

/// Per-trial profile maxima behind mc_threshold, exposed for reuse when one
/// run feeds several quantile levels.
std::vector<double> mc_profile_maxima(const ModelSpec& stationary_spec, std::size_t trials,
                                      double beta, double alpha, std::uint64_t seed,
                                      std::size_t workers = 0);

/// Practical threshold C(N) = sigma_max * fmax / sqrt(N) * lambda.
/// All inputs positive; sigma_max and fmax are the square-rooted maxima of
/// the noise dispersions and plan functions.
double analytic_threshold(std::size_t n, double lambda, double sigma_max, double fmax);

/// Scalar-response limit-law setup: deterministic plan plus a positive noise
/// scale function g(t).
struct LimitLawSpec {
    RegressionPlan plan;                    // deterministic, K channels, M = 1
    std::function<double(double)> noise_std; // g(t) > 0 on [0,1]

    void validate() const;
};

/// Correlation matrix D(t) of the limiting Gaussian vector
///   U(t) = G(t) W(t) - A(t) I^{-1} G(1) W(1):
///   D(t) = t [G G^T - G G1^T I^{-1} A - A I^{-1} G1 G^T] + A I^{-1} G1 G1^T I^{-1} A
/// with sigma_i^2(t) = (1/t) int_0^t f_i^2 g^2 ds and A(t) the plan gram
/// integral. Positive semidefinite by construction (it is a covariance).
Matrix limit_corr_matrix(const LimitLawSpec& spec, double t);

/// Threshold from the limit law: draws standard Gaussian K-vectors zeta and
/// takes the level-quantile of rho(zeta) = max_j sqrt(sum_i d_i^2(t_j) zeta_i^2)
/// over a uniform t-grid, d_i^2 the eigenvalues of D(t_j). The value is in
/// sqrt(N)-scaled units: the finite-N threshold is value / sqrt(N).
ThresholdEstimate limit_threshold(const LimitLawSpec& spec, double level, std::size_t grid,
                                  std::size_t mc_draws, std::uint64_t seed);

} // namespace cpd
