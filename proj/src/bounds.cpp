#include "cpd/bounds.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "cpd/errors.hpp"
#include "cpd/quadrature.hpp"

namespace cpd {

namespace {

constexpr std::size_t kPanels = 1024;

// KL(N(m0, v0) || N(m1, v1)) in nats, variances v0, v1 > 0.
double gaussian_kl(double m0, double v0, double m1, double v1) {
    return 0.5 * (std::log(v1 / v0) + (v0 + (m0 - m1) * (m0 - m1)) / v1 - 1.0);
}

} // namespace

double theorem1_exponent(const KlPair& kl, double theta, double eps) {
    if (!(eps > 0.0 && eps < std::min(theta, 1.0 - theta))) {
        throw BadEpsError("theorem1_exponent: need 0 < eps < min(theta, 1 - theta)");
    }
    const double right = simpson(kl.j0, theta, theta + eps, kPanels);
    const double left = simpson(kl.j1, theta - eps, theta, kPanels);
    return std::min(right, left);
}

KlPair kl_gaussian_trend(std::function<double(double)> phi0, std::function<double(double)> phi1) {
    auto j = [p0 = std::move(phi0), p1 = std::move(phi1)](double t) {
        const double d = p0(t) - p1(t);
        return 0.5 * d * d;
    };
    return KlPair{j, j};
}

KlPair kl_gaussian_regression(const std::vector<PlanFunction>& plan, const Vector& a,
                              const Vector& b, double sigma) {
    if (a.dim != plan.size() || b.dim != plan.size()) {
        throw DimMismatchError("kl_gaussian_regression: coefficient/plan dimension mismatch");
    }
    if (sigma <= 0.0) {
        throw NonPositiveError("kl_gaussian_regression: sigma must be positive");
    }
    auto j = [plan, a, b, inv_two_var = 0.5 / (sigma * sigma)](double t) {
        double d = 0.0;
        for (std::size_t i = 0; i < plan.size(); ++i) {
            d += plan[i](t) * (a[i] - b[i]);
        }
        return d * d * inv_two_var;
    };
    return KlPair{j, j};
}

KlPair kl_gaussian_stochastic(const std::vector<PlanFunction>& mean_fns,
                              const std::vector<PlanFunction>& sd_fns, const Vector& a,
                              const Vector& b) {
    const std::size_t k = mean_fns.size();
    if (sd_fns.size() != k || a.dim != k || b.dim != k) {
        throw DimMismatchError("kl_gaussian_stochastic: dimension mismatch");
    }
    auto response_law = [mean_fns, sd_fns](const Vector& c, double t) {
        double mean = 0.0;
        double var = 0.0;
        for (std::size_t i = 0; i < c.dim; ++i) {
            const double s = sd_fns[i](t);
            mean += c[i] * mean_fns[i](t);
            var += c[i] * c[i] * s * s;
        }
        if (var <= 0.0) {
            throw DegenerateVarianceError("kl_gaussian_stochastic: response variance vanished");
        }
        return std::pair<double, double>{mean, var};
    };
    auto j0 = [response_law, a, b](double t) {
        const auto [m0, v0] = response_law(a, t);
        const auto [m1, v1] = response_law(b, t);
        return gaussian_kl(m0, v0, m1, v1);
    };
    auto j1 = [response_law, a, b](double t) {
        const auto [m0, v0] = response_law(a, t);
        const auto [m1, v1] = response_law(b, t);
        return gaussian_kl(m1, v1, m0, v0);
    };
    // Probe a coarse grid eagerly so degenerate variances surface at
    // construction, not deep inside a quadrature loop.
    for (int i = 0; i <= 32; ++i) {
        const double t = static_cast<double>(i) / 32.0;
        response_law(a, t);
        response_law(b, t);
    }
    return KlPair{std::move(j0), std::move(j1)};
}

double theorem2_exponent(const std::vector<KlPair>& kls, const std::vector<double>& thetas,
                         double eps) {
    if (kls.size() != thetas.size() || kls.empty()) {
        throw DimMismatchError("theorem2_exponent: one KlPair per change required");
    }
    double prev = 0.0;
    double separation = 1.0;
    for (double th : thetas) {
        if (!(th > prev && th < 1.0)) {
            throw ConfigError("theorem2_exponent: thetas must be strictly increasing in (0,1)");
        }
        separation = std::min(separation, th - prev);
        prev = th;
    }
    separation = std::min(separation, 1.0 - prev);
    if (!(eps > 0.0)) {
        throw BadEpsError("theorem2_exponent: eps must be positive");
    }
    if (eps >= separation) {
        throw SeparationError("theorem2_exponent: eps must be below the minimal segment separation");
    }
    double exponent = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < kls.size(); ++i) {
        const double right = simpson(kls[i].j0, thetas[i], thetas[i] + eps, kPanels);
        const double left = simpson(kls[i].j1, thetas[i] - eps, thetas[i], kPanels);
        exponent = std::min(exponent, std::min(right, left));
    }
    return exponent;
}

} // namespace cpd
