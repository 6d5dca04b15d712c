#include "cpd/calibrate.hpp"

#include <algorithm>
#include <cmath>

#include "cpd/errors.hpp"
#include "cpd/parallel.hpp"
#include "cpd/quadrature.hpp"
#include "cpd/rng.hpp"
#include "cpd/stat.hpp"

namespace cpd {

namespace {

constexpr std::size_t kQuadPanels = 2048;

} // namespace

double empirical_quantile(std::vector<double> values, double level) {
    if (values.empty()) {
        throw ConfigError("empirical_quantile: no values");
    }
    if (!(level > 0.0 && level < 1.0)) {
        throw ConfigError("empirical_quantile: level must be in (0,1)");
    }
    std::sort(values.begin(), values.end());
    const auto n = values.size();
    std::size_t rank = static_cast<std::size_t>(
        std::ceil(level * static_cast<double>(n) - 1e-12)); // 1-based order statistic
    rank = std::clamp<std::size_t>(rank, 1, n);
    return values[rank - 1];
}

double quantile_stderr(const std::vector<double>& sorted_values, double level) {
    const auto n = sorted_values.size();
    if (n < 2) {
        return 0.0;
    }
    const double p = level;
    const auto rank = static_cast<std::ptrdiff_t>(
        std::ceil(p * static_cast<double>(n) - 1e-12));
    const auto spread = static_cast<std::ptrdiff_t>(
        std::max(1.0, std::round(std::sqrt(static_cast<double>(n) * p * (1.0 - p)))));
    const std::size_t lo = static_cast<std::size_t>(
        std::clamp<std::ptrdiff_t>(rank - spread, 1, static_cast<std::ptrdiff_t>(n))) - 1;
    const std::size_t hi = static_cast<std::size_t>(
        std::clamp<std::ptrdiff_t>(rank + spread, 1, static_cast<std::ptrdiff_t>(n))) - 1;
    return 0.5 * (sorted_values[hi] - sorted_values[lo]);
}

std::vector<double> mc_profile_maxima(const ModelSpec& stationary_spec, std::size_t trials,
                                      double beta, double alpha, std::uint64_t seed,
                                      std::size_t workers) {
    if (stationary_spec.coeffs.segments.size() != 1) {
        throw NotStationaryError("mc_profile_maxima: spec must have a single segment");
    }
    std::vector<double> maxima(trials, 0.0);
    parallel_for(trials, workers, [&](std::size_t i) {
        const Sample sample = simulate(stationary_spec, trial_seed(seed, i));
        maxima[i] = profile(sample, beta, alpha).max_value;
    });
    return maxima;
}

ThresholdEstimate mc_threshold(const ModelSpec& stationary_spec, double level, std::size_t trials,
                               double beta, double alpha, std::uint64_t seed,
                               std::size_t workers) {
    if (trials < 100) {
        throw ConfigError("mc_threshold: at least 100 trials required");
    }
    std::vector<double> maxima =
        mc_profile_maxima(stationary_spec, trials, beta, alpha, seed, workers);
    std::sort(maxima.begin(), maxima.end());

    ThresholdEstimate est;
    est.level = level;
    est.method = ThresholdEstimate::Method::MonteCarlo;
    est.trials = trials;
    est.stderr_value = quantile_stderr(maxima, level);
    const auto rank = static_cast<std::size_t>(
        std::ceil(level * static_cast<double>(trials) - 1e-12));
    est.value = maxima[std::clamp<std::size_t>(rank, 1, trials) - 1];
    return est;
}

double analytic_threshold(std::size_t n, double lambda, double sigma_max, double fmax) {
    if (n == 0 || lambda <= 0.0 || sigma_max <= 0.0 || fmax <= 0.0) {
        throw NonPositiveError("analytic_threshold: all inputs must be positive");
    }
    return sigma_max * fmax / std::sqrt(static_cast<double>(n)) * lambda;
}

void LimitLawSpec::validate() const {
    if (plan.kind != RegressionPlan::Kind::Deterministic) {
        throw WrongKindError("LimitLawSpec: plan must be deterministic");
    }
    if (plan.functions.empty()) {
        throw ConfigError("LimitLawSpec: plan has no channels");
    }
    if (!noise_std) {
        throw ConfigError("LimitLawSpec: missing noise scale function");
    }
}

Matrix limit_corr_matrix(const LimitLawSpec& spec, double t) {
    spec.validate();
    if (!(t > 0.0 && t <= 1.0)) {
        throw BadRangeError("limit_corr_matrix: need 0 < t <= 1");
    }
    const auto& fns = spec.plan.functions;
    const auto& g = spec.noise_std;
    const std::size_t k = fns.size();

    auto gram_integral = [&](double upper) {
        Matrix m(k, k);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = i; j < k; ++j) {
                m(i, j) = simpson([&](double s) { return fns[i](s) * fns[j](s); }, 0.0, upper,
                                  kQuadPanels);
                m(j, i) = m(i, j);
            }
        }
        return m;
    };

    auto sigma_vec = [&](double upper) {
        Matrix v(k, 1);
        for (std::size_t i = 0; i < k; ++i) {
            const double integral = simpson(
                [&](double s) {
                    const double fg = fns[i](s) * g(s);
                    return fg * fg;
                },
                0.0, upper, kQuadPanels);
            v(i, 0) = std::sqrt(std::max(0.0, integral / upper));
        }
        return v;
    };

    const Matrix eye = gram_integral(1.0);
    const Matrix a_t = gram_integral(t);
    const Matrix g_t = sigma_vec(t);  // K x 1
    const Matrix g_1 = sigma_vec(1.0);

    const Matrix i_inv_a = solve(eye, a_t);  // I^{-1} A(t)
    const Matrix proj = multiply(a_t, solve(eye, g_1)); // A(t) I^{-1} G(1), K x 1
    const Matrix mixed = multiply(multiply(g_t, transpose(g_1)), i_inv_a); // G G1^T I^{-1} A

    // Covariance of U(t) = G(t) W(t) - A(t) I^{-1} G(1) W(1).
    Matrix d = multiply(g_t, transpose(g_t));
    d -= mixed;
    d -= transpose(mixed);
    d *= t;
    d += multiply(proj, transpose(proj));

    // Symmetrize against roundoff.
    Matrix sym(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            sym(i, j) = 0.5 * (d(i, j) + d(j, i));
        }
    }
    return sym;
}

ThresholdEstimate limit_threshold(const LimitLawSpec& spec, double level, std::size_t grid,
                                  std::size_t mc_draws, std::uint64_t seed) {
    spec.validate();
    if (grid < 64) {
        throw ConfigError("limit_threshold: grid must be at least 64");
    }
    if (mc_draws < 1000) {
        throw ConfigError("limit_threshold: at least 1000 draws required");
    }
    const std::size_t k = spec.plan.functions.size();

    // Eigenvalues d_i^2(t_j) on the uniform grid t_j = j / grid, j = 1..grid.
    std::vector<std::vector<double>> eigs(grid);
    for (std::size_t j = 0; j < grid; ++j) {
        const double t = static_cast<double>(j + 1) / static_cast<double>(grid);
        const Vector ev = sym_eigenvalues(limit_corr_matrix(spec, t));
        eigs[j].assign(ev.entries.begin(), ev.entries.end());
        for (double& e : eigs[j]) {
            e = std::max(0.0, e); // clip tiny negative roundoff
        }
    }

    CounterRng rng(seed, 0x11D7);
    std::vector<double> rho(mc_draws, 0.0);
    std::vector<double> z2(k);
    for (std::size_t d = 0; d < mc_draws; ++d) {
        for (std::size_t i = 0; i < k; ++i) {
            const double z = rng.next_gaussian();
            z2[i] = z * z;
        }
        double best = 0.0;
        for (std::size_t j = 0; j < grid; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                s += eigs[j][i] * z2[i];
            }
            best = std::max(best, s);
        }
        rho[d] = std::sqrt(best);
    }
    std::sort(rho.begin(), rho.end());

    ThresholdEstimate est;
    est.level = level;
    est.method = ThresholdEstimate::Method::LimitLaw;
    est.trials = mc_draws;
    est.stderr_value = quantile_stderr(rho, level);
    const auto rank = static_cast<std::size_t>(
        std::ceil(level * static_cast<double>(mc_draws) - 1e-12));
    est.value = rho[std::clamp<std::size_t>(rank, 1, mc_draws) - 1];
    return est;
}

} // namespace cpd
