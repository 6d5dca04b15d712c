#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "cpd/matrix.hpp"

namespace cpd {

/// Integer part [frac * N], nudged so exact-decimal fractions land on the
/// intended grid point despite binary rounding (0.3 * 1000 -> 300, not 299).
inline std::size_t grid_index(double frac, std::size_t N) {
    const double v = frac * static_cast<double>(N) + 1e-9;
    return v <= 0.0 ? 0 : static_cast<std::size_t>(v);
}

/// A scalar function of t in [0,1], restricted to a few named shapes so plans
/// can round-trip through JSON configs.
struct PlanFunction {
    enum class Kind { Constant, Linear, Cosine, Power };

    Kind kind = Kind::Constant;
    double a = 0.0; // Constant: value; Linear: intercept; Cosine: mean;  Power: exponent
    double b = 0.0; // Linear: slope;     Cosine: amplitude
    double c = 0.0; // Cosine: frequency (cycles over [0,1])

    double operator()(double t) const;

    static PlanFunction constant(double value);
    static PlanFunction linear(double intercept, double slope);
    static PlanFunction cosine(double mean, double amplitude, double frequency);
    static PlanFunction power(double exponent);
};

/// One regime of the two-equation simultaneous system used by the Ses plan:
///   y_i = u0 + u1 y_{i-1} + u2 z_{i-1} + u3 x_i + eps_i
///   z_i = u4 + u5 y_i + u6 x_i + xi_i
/// Predetermined channels are (1, y_{i-1}, z_{i-1}, x_i), so K = 4 and M = 2.
struct SesSegment {
    double theta = 1.0;
    std::array<double, 7> u{};
};

struct RegressionPlan {
    enum class Kind { Deterministic, Ar1, Ses };

    Kind kind = Kind::Deterministic;

    // Deterministic: one function per predictor channel.
    std::vector<PlanFunction> functions;

    // Ar1: x_n = rho * x_{n-1} + eta_n with x_0 = 0; optional constant-1
    // intercept channel ahead of the stochastic one.
    double ar_rho = 0.0;
    double ar_innovation_std = 1.0;
    bool ar_intercept = true;

    // Ses: autoregression coefficient of the exogenous x channel, plus the
    // structural coefficients per regime (thetas aligned with the reduced
    // piecewise coefficients).
    double ses_x_ar = 0.5;
    std::vector<SesSegment> ses_segments;

    std::size_t channel_count() const;

    static RegressionPlan deterministic(std::vector<PlanFunction> fns);
    static RegressionPlan ar1(double rho, double innovation_std = 1.0, bool intercept = true);
    static RegressionPlan ses(double x_ar, std::vector<SesSegment> segments);
};

/// Piecewise-constant coefficient matrices. Segment i covers sample indices
/// ([theta_{i-1} N], [theta_i N]] with integer truncation; the last theta is 1.
struct PiecewiseCoefficients {
    struct Segment {
        double theta = 1.0;
        Matrix coeff; // M x K
    };

    std::vector<Segment> segments;

    std::size_t predictor_count() const; // K
    std::size_t response_count() const;  // M

    /// Index of the segment owning 1-based sample index n out of N.
    std::size_t segment_at(std::size_t n, std::size_t N) const;

    void validate() const;

    static PiecewiseCoefficients single(Matrix coeff);
    static PiecewiseCoefficients two(Matrix first, double theta, Matrix second);
};

struct NoiseModel {
    enum class Kind { IidGaussian, Ar1Gaussian };

    Kind kind = Kind::IidGaussian;
    std::vector<double> std_dev; // innovation std per response channel
    std::vector<double> ar;      // AR(1) coefficient per channel (Ar1Gaussian only)

    void validate(std::size_t responses) const;

    static NoiseModel iid(std::vector<double> stds);
    static NoiseModel ar1(std::vector<double> stds, std::vector<double> ar_coeffs);
};

/// Observed data: K predictor channels and M response channels over N steps.
struct Sample {
    std::size_t N = 0;
    std::size_t K = 0;
    std::size_t M = 0;
    Matrix X; // K x N
    Matrix Y; // M x N
};

struct ModelSpec {
    RegressionPlan plan;
    PiecewiseCoefficients coeffs;
    NoiseModel noise;
    std::size_t N = 0;

    void validate() const;
};

/// Evaluates a deterministic plan on the grid t = n/N, n = 1..N.
/// Throws WrongKindError for stochastic plans.
Matrix evaluate_plan(const RegressionPlan& plan, std::size_t N);

/// Draws a sample from the spec. Pure function of (spec, seed): every
/// (trial, channel) stream is keyed independently, so results are
/// bit-reproducible and safe to generate from parallel workers.
Sample simulate(const ModelSpec& spec, std::uint64_t seed);

/// Reduced-form coefficient matrix -B^{-1} Gamma of the structural system
/// B Y + Gamma X = eps.
Matrix ses_to_reduced(const Matrix& b, const Matrix& gamma);

/// Reduced M x K coefficient matrix of one Ses regime.
Matrix ses_segment_reduced(const SesSegment& seg);

/// Assembles a full ModelSpec for the two-equation simultaneous system:
/// plan channels (1, y_{i-1}, z_{i-1}, x_i), reduced piecewise coefficients
/// derived from the structural ones, AR noise on the first equation.
ModelSpec make_ses_spec(std::vector<SesSegment> segments, std::size_t N, double x_ar = 0.5,
                        double eps_ar = 0.3);

} // namespace cpd
