#include "cpd/model.hpp"

#include <cmath>
#include <utility>

#include "cpd/errors.hpp"
#include "cpd/rng.hpp"

namespace cpd {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Stream salts: predictor channel c uses salt c, response noise channel c
// uses salt kNoiseSaltBase + c.
constexpr std::uint64_t kNoiseSaltBase = 0x100;

} // namespace

double PlanFunction::operator()(double t) const {
    switch (kind) {
    case Kind::Constant:
        return a;
    case Kind::Linear:
        return a + b * t;
    case Kind::Cosine:
        return a + b * std::cos(kTwoPi * c * t);
    case Kind::Power:
        return std::pow(t, a);
    }
    return 0.0;
}

PlanFunction PlanFunction::constant(double value) {
    PlanFunction f;
    f.kind = Kind::Constant;
    f.a = value;
    return f;
}

PlanFunction PlanFunction::linear(double intercept, double slope) {
    PlanFunction f;
    f.kind = Kind::Linear;
    f.a = intercept;
    f.b = slope;
    return f;
}

PlanFunction PlanFunction::cosine(double mean, double amplitude, double frequency) {
    PlanFunction f;
    f.kind = Kind::Cosine;
    f.a = mean;
    f.b = amplitude;
    f.c = frequency;
    return f;
}

PlanFunction PlanFunction::power(double exponent) {
    PlanFunction f;
    f.kind = Kind::Power;
    f.a = exponent;
    return f;
}

std::size_t RegressionPlan::channel_count() const {
    switch (kind) {
    case Kind::Deterministic:
        return functions.size();
    case Kind::Ar1:
        return ar_intercept ? 2 : 1;
    case Kind::Ses:
        return 4;
    }
    return 0;
}

RegressionPlan RegressionPlan::deterministic(std::vector<PlanFunction> fns) {
    RegressionPlan p;
    p.kind = Kind::Deterministic;
    p.functions = std::move(fns);
    return p;
}

RegressionPlan RegressionPlan::ar1(double rho, double innovation_std, bool intercept) {
    if (std::abs(rho) >= 1.0) {
        throw ConfigError("RegressionPlan::ar1: |rho| must be < 1");
    }
    RegressionPlan p;
    p.kind = Kind::Ar1;
    p.ar_rho = rho;
    p.ar_innovation_std = innovation_std;
    p.ar_intercept = intercept;
    return p;
}

RegressionPlan RegressionPlan::ses(double x_ar, std::vector<SesSegment> segments) {
    if (std::abs(x_ar) >= 1.0) {
        throw ConfigError("RegressionPlan::ses: |x_ar| must be < 1");
    }
    if (segments.empty()) {
        throw ConfigError("RegressionPlan::ses: at least one regime required");
    }
    RegressionPlan p;
    p.kind = Kind::Ses;
    p.ses_x_ar = x_ar;
    p.ses_segments = std::move(segments);
    return p;
}

std::size_t PiecewiseCoefficients::predictor_count() const {
    return segments.empty() ? 0 : segments.front().coeff.cols();
}

std::size_t PiecewiseCoefficients::response_count() const {
    return segments.empty() ? 0 : segments.front().coeff.rows();
}

std::size_t PiecewiseCoefficients::segment_at(std::size_t n, std::size_t N) const {
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (n <= grid_index(segments[i].theta, N)) {
            return i;
        }
    }
    return segments.size() - 1;
}

void PiecewiseCoefficients::validate() const {
    if (segments.empty()) {
        throw ConfigError("PiecewiseCoefficients: no segments");
    }
    double prev = 0.0;
    for (const auto& s : segments) {
        if (!(s.theta > prev && s.theta <= 1.0)) {
            throw ConfigError("PiecewiseCoefficients: thetas must be strictly increasing in (0,1]");
        }
        if (!s.coeff.same_shape(segments.front().coeff)) {
            throw DimMismatchError("PiecewiseCoefficients: segment coefficient shapes differ");
        }
        prev = s.theta;
    }
    if (segments.back().theta != 1.0) {
        throw ConfigError("PiecewiseCoefficients: last theta must be 1");
    }
    for (std::size_t i = 1; i < segments.size(); ++i) {
        if (frobenius_norm(segments[i].coeff - segments[i - 1].coeff) == 0.0) {
            throw ConfigError("PiecewiseCoefficients: adjacent segments must differ");
        }
    }
}

PiecewiseCoefficients PiecewiseCoefficients::single(Matrix coeff) {
    PiecewiseCoefficients c;
    c.segments.push_back({1.0, std::move(coeff)});
    return c;
}

PiecewiseCoefficients PiecewiseCoefficients::two(Matrix first, double theta, Matrix second) {
    PiecewiseCoefficients c;
    c.segments.push_back({theta, std::move(first)});
    c.segments.push_back({1.0, std::move(second)});
    return c;
}

void NoiseModel::validate(std::size_t responses) const {
    if (std_dev.size() != responses) {
        throw DimMismatchError("NoiseModel: one std per response channel required");
    }
    for (double s : std_dev) {
        if (s < 0.0) {
            throw ConfigError("NoiseModel: std must be nonnegative");
        }
    }
    if (kind == Kind::Ar1Gaussian) {
        if (ar.size() != responses) {
            throw DimMismatchError("NoiseModel: one AR coefficient per channel required");
        }
        for (double a : ar) {
            if (std::abs(a) >= 1.0) {
                throw ConfigError("NoiseModel: |ar| must be < 1");
            }
        }
    }
}

NoiseModel NoiseModel::iid(std::vector<double> stds) {
    NoiseModel n;
    n.kind = Kind::IidGaussian;
    n.std_dev = std::move(stds);
    return n;
}

NoiseModel NoiseModel::ar1(std::vector<double> stds, std::vector<double> ar_coeffs) {
    NoiseModel n;
    n.kind = Kind::Ar1Gaussian;
    n.std_dev = std::move(stds);
    n.ar = std::move(ar_coeffs);
    return n;
}

void ModelSpec::validate() const {
    coeffs.validate();
    if (plan.channel_count() != coeffs.predictor_count()) {
        throw DimMismatchError("ModelSpec: plan channel count != coefficient columns");
    }
    noise.validate(coeffs.response_count());
    if (N == 0) {
        throw ConfigError("ModelSpec: N must be positive");
    }
    if (plan.kind == RegressionPlan::Kind::Ses) {
        if (plan.ses_segments.size() != coeffs.segments.size()) {
            throw ConfigError("ModelSpec: Ses structural regimes must match coefficient segments");
        }
        if (coeffs.response_count() != 2) {
            throw DimMismatchError("ModelSpec: Ses system has two responses");
        }
    }
}

Matrix evaluate_plan(const RegressionPlan& plan, std::size_t N) {
    if (plan.kind != RegressionPlan::Kind::Deterministic) {
        throw WrongKindError("evaluate_plan: plan is not deterministic");
    }
    const std::size_t k = plan.functions.size();
    Matrix x(k, N);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t n = 0; n < N; ++n) {
            const double t = static_cast<double>(n + 1) / static_cast<double>(N);
            const double v = plan.functions[i](t);
            if (!std::isfinite(v)) {
                throw ConfigError("evaluate_plan: plan function produced a non-finite value");
            }
            x(i, n) = v;
        }
    }
    return x;
}

namespace {

// Draws the M x N noise panel. AR channels start at 0, matching the x_0 = 0
// convention of the stochastic plans.
Matrix draw_noise(const NoiseModel& noise, std::size_t M, std::size_t N, std::uint64_t seed) {
    Matrix nu(M, N);
    for (std::size_t c = 0; c < M; ++c) {
        CounterRng rng(seed, kNoiseSaltBase + c);
        const double sd = noise.std_dev[c];
        const double ar = noise.kind == NoiseModel::Kind::Ar1Gaussian ? noise.ar[c] : 0.0;
        double state = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            state = ar * state + sd * rng.next_gaussian();
            nu(c, n) = state;
        }
    }
    return nu;
}

Sample simulate_linear(const ModelSpec& spec, const Matrix& x, std::uint64_t seed) {
    const std::size_t N = spec.N;
    const std::size_t K = spec.coeffs.predictor_count();
    const std::size_t M = spec.coeffs.response_count();
    const Matrix nu = draw_noise(spec.noise, M, N, seed);

    Matrix y(M, N);
    for (std::size_t n = 1; n <= N; ++n) {
        const Matrix& pi = spec.coeffs.segments[spec.coeffs.segment_at(n, N)].coeff;
        for (std::size_t r = 0; r < M; ++r) {
            double acc = 0.0;
            for (std::size_t c = 0; c < K; ++c) {
                acc += pi(r, c) * x(c, n - 1);
            }
            y(r, n - 1) = acc + nu(r, n - 1);
        }
    }
    return Sample{N, K, M, x, y};
}

Matrix draw_ar1_plan(const RegressionPlan& plan, std::size_t N, std::uint64_t seed) {
    const std::size_t K = plan.channel_count();
    Matrix x(K, N);
    std::size_t chan = 0;
    if (plan.ar_intercept) {
        for (std::size_t n = 0; n < N; ++n) {
            x(0, n) = 1.0;
        }
        chan = 1;
    }
    CounterRng rng(seed, chan);
    double state = 0.0; // x_0 = 0
    for (std::size_t n = 0; n < N; ++n) {
        state = plan.ar_rho * state + plan.ar_innovation_std * rng.next_gaussian();
        x(chan, n) = state;
    }
    return x;
}

Sample simulate_ses(const ModelSpec& spec, std::uint64_t seed) {
    const std::size_t N = spec.N;
    const RegressionPlan& plan = spec.plan;

    CounterRng x_rng(seed, 3);                    // exogenous channel
    CounterRng eps_rng(seed, kNoiseSaltBase);     // first-equation noise
    CounterRng xi_rng(seed, kNoiseSaltBase + 1);  // second-equation noise

    const double eps_sd = spec.noise.std_dev[0];
    const double xi_sd = spec.noise.std_dev[1];
    const double eps_ar = spec.noise.kind == NoiseModel::Kind::Ar1Gaussian ? spec.noise.ar[0] : 0.0;
    const double xi_ar = spec.noise.kind == NoiseModel::Kind::Ar1Gaussian ? spec.noise.ar[1] : 0.0;

    Matrix x(4, N);
    Matrix y(2, N);
    double y_prev = 0.0, z_prev = 0.0, x_state = 0.0, eps_state = 0.0, xi_state = 0.0;
    for (std::size_t n = 1; n <= N; ++n) {
        x_state = plan.ses_x_ar * x_state + x_rng.next_gaussian();
        eps_state = eps_ar * eps_state + eps_sd * eps_rng.next_gaussian();
        xi_state = xi_ar * xi_state + xi_sd * xi_rng.next_gaussian();

        const auto& u = plan.ses_segments[spec.coeffs.segment_at(n, N)].u;
        const double yi = u[0] + u[1] * y_prev + u[2] * z_prev + u[3] * x_state + eps_state;
        const double zi = u[4] + u[5] * yi + u[6] * x_state + xi_state;

        x(0, n - 1) = 1.0;
        x(1, n - 1) = y_prev;
        x(2, n - 1) = z_prev;
        x(3, n - 1) = x_state;
        y(0, n - 1) = yi;
        y(1, n - 1) = zi;

        y_prev = yi;
        z_prev = zi;
    }
    return Sample{N, 4, 2, std::move(x), std::move(y)};
}

} // namespace

Sample simulate(const ModelSpec& spec, std::uint64_t seed) {
    spec.validate();
    switch (spec.plan.kind) {
    case RegressionPlan::Kind::Deterministic:
        return simulate_linear(spec, evaluate_plan(spec.plan, spec.N), seed);
    case RegressionPlan::Kind::Ar1:
        return simulate_linear(spec, draw_ar1_plan(spec.plan, spec.N, seed), seed);
    case RegressionPlan::Kind::Ses:
        return simulate_ses(spec, seed);
    }
    throw ConfigError("simulate: unknown plan kind");
}

Matrix ses_to_reduced(const Matrix& b, const Matrix& gamma) {
    if (b.rows() != b.cols()) {
        throw NotSquareError("ses_to_reduced: B must be square");
    }
    if (gamma.rows() != b.rows()) {
        throw DimMismatchError("ses_to_reduced: Gamma row count must match B");
    }
    return -1.0 * solve(b, gamma);
}

Matrix ses_segment_reduced(const SesSegment& seg) {
    const auto& u = seg.u;
    const Matrix b = Matrix::from_rows({{1.0, 0.0}, {-u[5], 1.0}});
    const Matrix c = Matrix::from_rows({{u[0], u[1], u[2], u[3]}, {u[4], 0.0, 0.0, u[6]}});
    return ses_to_reduced(b, -1.0 * c);
}

ModelSpec make_ses_spec(std::vector<SesSegment> segments, std::size_t N, double x_ar,
                        double eps_ar) {
    ModelSpec spec;
    spec.N = N;
    PiecewiseCoefficients coeffs;
    for (const auto& seg : segments) {
        coeffs.segments.push_back({seg.theta, ses_segment_reduced(seg)});
    }
    spec.coeffs = std::move(coeffs);
    spec.plan = RegressionPlan::ses(x_ar, std::move(segments));
    spec.noise = NoiseModel::ar1({1.0, 1.0}, {eps_ar, 0.0});
    spec.validate();
    return spec;
}

} // namespace cpd
