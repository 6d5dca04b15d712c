#include <doctest.h>

#include <cmath>

#include "cpd/baseline.hpp"
#include "cpd/errors.hpp"
#include "cpd/matrix.hpp"
#include "cpd/model.hpp"
#include "cpd/rng.hpp"

using namespace cpd;

namespace {

Sample noisy_sample(std::uint64_t seed, std::size_t n, double intercept_shift, double theta) {
    ModelSpec spec;
    spec.N = n;
    spec.plan = RegressionPlan::deterministic(
        {PlanFunction::constant(1.0), PlanFunction::cosine(2.2, 1.1, 10.0)});
    if (intercept_shift == 0.0) {
        spec.coeffs = PiecewiseCoefficients::single(Matrix::from_rows({{0.0, 1.0}}));
    } else {
        spec.coeffs = PiecewiseCoefficients::two(Matrix::from_rows({{0.0, 1.0}}), theta,
                                                 Matrix::from_rows({{intercept_shift, 1.0}}));
    }
    spec.noise = NoiseModel::iid({1.0});
    return simulate(spec, seed);
}

} // namespace

TEST_CASE("ols_fit recovers an exact linear relation with zero residual") {
    CounterRng rng(3, 0);
    Matrix x(2, 30);
    Matrix y(1, 30);
    for (std::size_t n = 0; n < 30; ++n) {
        x(0, n) = 1.0;
        x(1, n) = rng.next_gaussian();
        y(0, n) = 0.4 * x(0, n) - 1.7 * x(1, n);
    }
    const OlsFit fit = ols_fit(x, y);
    CHECK(fit.coeffs(0, 0) == doctest::Approx(0.4).epsilon(1e-10));
    CHECK(fit.coeffs(0, 1) == doctest::Approx(-1.7).epsilon(1e-10));
    CHECK(fit.rss == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(fit.n_obs == 30);
}

TEST_CASE("ols_fit on the hand-checked mean problem") {
    Matrix x(1, 3);
    Matrix y(1, 3);
    for (std::size_t n = 0; n < 3; ++n) {
        x(0, n) = 1.0;
        y(0, n) = static_cast<double>(n + 1);
    }
    const OlsFit fit = ols_fit(x, y);
    CHECK(fit.coeffs(0, 0) == doctest::Approx(2.0));
    CHECK(fit.rss == doctest::Approx(2.0));
}

TEST_CASE("ols_fit rejects underdetermined designs") {
    Matrix x(3, 2);
    Matrix y(1, 2);
    CHECK_THROWS_AS(ols_fit(x, y), SingularMatrixError);
}

TEST_CASE("ols_fit matches brute-force normal equations on small instances") {
    CounterRng rng(5, 0);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t n = 8 + rng.next_u64() % 13; // <= 20
        const std::size_t k = 1 + rng.next_u64() % 3;
        Matrix x(k, n);
        Matrix y(2, n);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < k; ++i) {
                x(i, j) = rng.next_gaussian() + (i == 0 ? 2.0 : 0.0);
            }
            for (std::size_t i = 0; i < 2; ++i) {
                y(i, j) = rng.next_gaussian();
            }
        }
        const OlsFit fit = ols_fit(x, y);

        // Dense normal equations via explicit inverse.
        Matrix gram(k, k);
        Matrix cross(k, 2);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < k; ++i) {
                for (std::size_t l = 0; l < k; ++l) {
                    gram(i, l) += x(i, j) * x(l, j);
                }
                for (std::size_t r = 0; r < 2; ++r) {
                    cross(i, r) += x(i, j) * y(r, j);
                }
            }
        }
        const Matrix coeffs = transpose(multiply(invert(gram), cross));
        CHECK(frobenius_norm(coeffs - fit.coeffs) < 1e-9 * std::max(1.0, frobenius_norm(coeffs)));

        double rss = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t r = 0; r < 2; ++r) {
                double fitv = 0.0;
                for (std::size_t i = 0; i < k; ++i) {
                    fitv += coeffs(r, i) * x(i, j);
                }
                rss += (y(r, j) - fitv) * (y(r, j) - fitv);
            }
        }
        CHECK(fit.rss == doctest::Approx(rss).epsilon(1e-9));
    }
}

TEST_CASE("SupW is nonnegative and finite on noisy stationary data") {
    const Sample s = noisy_sample(11, 400, 0.0, 0.0);
    const SupWaldResult w = sup_wald(s.X, s.Y, 0.05, 0.95);
    CHECK_FALSE(w.degenerate);
    CHECK(w.sup_w >= 0.0);
    CHECK(std::isfinite(w.sup_w));
    CHECK(w.n0 >= 20);
    CHECK(w.n0 <= 380);
}

TEST_CASE("SupW scale invariance in Y") {
    const Sample s = noisy_sample(12, 300, 0.4, 0.3);
    const SupWaldResult base = sup_wald(s.X, s.Y, 0.05, 0.95);
    Matrix scaled = s.Y;
    scaled *= -5.0;
    const SupWaldResult after = sup_wald(s.X, scaled, 0.05, 0.95);
    CHECK(after.n0 == base.n0);
    CHECK(after.sup_w == doctest::Approx(base.sup_w).epsilon(1e-9));
}

TEST_CASE("SupW shift invariance under Y -> Y + c X") {
    const Sample s = noisy_sample(13, 300, 0.4, 0.3);
    const SupWaldResult base = sup_wald(s.X, s.Y, 0.05, 0.95);
    Matrix shifted = s.Y;
    for (std::size_t n = 0; n < s.N; ++n) {
        shifted(0, n) += 1.3 * s.X(0, n) - 0.8 * s.X(1, n);
    }
    const SupWaldResult after = sup_wald(s.X, shifted, 0.05, 0.95);
    CHECK(after.n0 == base.n0);
    CHECK(after.sup_w == doctest::Approx(base.sup_w).epsilon(1e-8));
}

TEST_CASE("zero-noise change data drives SupW to the degenerate verdict") {
    ModelSpec spec;
    spec.N = 200;
    spec.plan = RegressionPlan::deterministic(
        {PlanFunction::constant(1.0), PlanFunction::cosine(0.0, 2.0, 8.0)});
    spec.coeffs = PiecewiseCoefficients::two(Matrix::from_rows({{0.0, 1.0}}), 0.5,
                                             Matrix::from_rows({{1.0, 1.0}}));
    spec.noise = NoiseModel::iid({0.0});
    const Sample s = simulate(spec, 2);
    const SupWaldResult w = sup_wald(s.X, s.Y, 0.05, 0.95);
    CHECK(w.degenerate);
    CHECK(std::isinf(w.sup_w));
    CHECK(w.n0 == 100); // true split is the first degenerate index
}

TEST_CASE("sup_wald window feasibility") {
    const Sample s = noisy_sample(14, 30, 0.0, 0.0);
    CHECK_THROWS_AS(sup_wald(s.X, s.Y, 0.97, 0.99), EmptyWindowError);
}
