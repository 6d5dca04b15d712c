#include "cpd/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "cpd/errors.hpp"

namespace cpd {

namespace {

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

json plan_function_to_json(const PlanFunction& f) {
    switch (f.kind) {
    case PlanFunction::Kind::Constant:
        return {{"kind", "constant"}, {"value", f.a}};
    case PlanFunction::Kind::Linear:
        return {{"kind", "linear"}, {"intercept", f.a}, {"slope", f.b}};
    case PlanFunction::Kind::Cosine:
        return {{"kind", "cosine"}, {"mean", f.a}, {"amplitude", f.b}, {"frequency", f.c}};
    case PlanFunction::Kind::Power:
        return {{"kind", "power"}, {"exponent", f.a}};
    }
    throw ConfigError("plan_function_to_json: unknown kind");
}

PlanFunction plan_function_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") {
        return PlanFunction::constant(j.at("value").get<double>());
    }
    if (kind == "linear") {
        return PlanFunction::linear(j.at("intercept").get<double>(), j.at("slope").get<double>());
    }
    if (kind == "cosine") {
        return PlanFunction::cosine(j.at("mean").get<double>(), j.at("amplitude").get<double>(),
                                    j.at("frequency").get<double>());
    }
    if (kind == "power") {
        return PlanFunction::power(j.at("exponent").get<double>());
    }
    throw ConfigError("unknown plan function kind: " + kind);
}

json plan_to_json(const RegressionPlan& plan) {
    switch (plan.kind) {
    case RegressionPlan::Kind::Deterministic: {
        json fns = json::array();
        for (const auto& f : plan.functions) {
            fns.push_back(plan_function_to_json(f));
        }
        return {{"kind", "deterministic"}, {"functions", fns}};
    }
    case RegressionPlan::Kind::Ar1:
        return {{"kind", "ar1"},
                {"rho", plan.ar_rho},
                {"innovation_std", plan.ar_innovation_std},
                {"intercept_channel", plan.ar_intercept}};
    case RegressionPlan::Kind::Ses: {
        json segs = json::array();
        for (const auto& s : plan.ses_segments) {
            segs.push_back({{"theta", s.theta}, {"u", s.u}});
        }
        return {{"kind", "ses"}, {"x_ar", plan.ses_x_ar}, {"segments", segs}};
    }
    }
    throw ConfigError("plan_to_json: unknown kind");
}

RegressionPlan plan_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "deterministic") {
        std::vector<PlanFunction> fns;
        for (const auto& f : j.at("functions")) {
            fns.push_back(plan_function_from_json(f));
        }
        return RegressionPlan::deterministic(std::move(fns));
    }
    if (kind == "ar1") {
        return RegressionPlan::ar1(j.at("rho").get<double>(),
                                   j.value("innovation_std", 1.0),
                                   j.value("intercept_channel", true));
    }
    if (kind == "ses") {
        std::vector<SesSegment> segs;
        for (const auto& s : j.at("segments")) {
            SesSegment seg;
            seg.theta = s.at("theta").get<double>();
            const auto u = s.at("u").get<std::vector<double>>();
            if (u.size() != seg.u.size()) {
                throw ConfigError("ses segment: u must have 7 coefficients");
            }
            std::copy(u.begin(), u.end(), seg.u.begin());
            segs.push_back(seg);
        }
        return RegressionPlan::ses(j.value("x_ar", 0.5), std::move(segs));
    }
    throw ConfigError("unknown plan kind: " + kind);
}

json noise_to_json(const NoiseModel& noise) {
    json j;
    j["kind"] = noise.kind == NoiseModel::Kind::IidGaussian ? "iid_gaussian" : "ar1_gaussian";
    j["std"] = noise.std_dev;
    if (noise.kind == NoiseModel::Kind::Ar1Gaussian) {
        j["ar"] = noise.ar;
    }
    return j;
}

NoiseModel noise_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "iid_gaussian") {
        return NoiseModel::iid(j.at("std").get<std::vector<double>>());
    }
    if (kind == "ar1_gaussian") {
        return NoiseModel::ar1(j.at("std").get<std::vector<double>>(),
                               j.at("ar").get<std::vector<double>>());
    }
    throw ConfigError("unknown noise kind: " + kind);
}

} // namespace

json to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) {
            row.push_back(m(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    const std::size_t rows = j.size();
    const std::size_t cols = rows > 0 ? j.at(0).size() : 0;
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const auto& row = j.at(i);
        if (row.size() != cols) {
            throw ConfigError("matrix_from_json: ragged rows");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            m(i, c) = row.at(c).get<double>();
        }
    }
    return m;
}

json to_json(const ModelSpec& spec) {
    json j;
    j["N"] = spec.N;
    j["plan"] = plan_to_json(spec.plan);
    j["noise"] = noise_to_json(spec.noise);
    json segs = json::array();
    for (const auto& s : spec.coeffs.segments) {
        segs.push_back({{"theta", s.theta}, {"coeff", to_json(s.coeff)}});
    }
    j["coeffs"] = {{"segments", segs}};
    return j;
}

ModelSpec model_spec_from_json(const json& j) {
    ModelSpec spec;
    spec.N = j.at("N").get<std::size_t>();
    spec.plan = plan_from_json(j.at("plan"));
    if (spec.plan.kind == RegressionPlan::Kind::Ses) {
        // Reduced coefficients are derived from the structural regimes.
        PiecewiseCoefficients coeffs;
        for (const auto& seg : spec.plan.ses_segments) {
            coeffs.segments.push_back({seg.theta, ses_segment_reduced(seg)});
        }
        spec.coeffs = std::move(coeffs);
        if (j.contains("noise")) {
            spec.noise = noise_from_json(j.at("noise"));
        } else {
            spec.noise = NoiseModel::ar1({1.0, 1.0}, {0.3, 0.0});
        }
    } else {
        for (const auto& s : j.at("coeffs").at("segments")) {
            spec.coeffs.segments.push_back(
                {s.at("theta").get<double>(), matrix_from_json(s.at("coeff"))});
        }
        spec.noise = noise_from_json(j.at("noise"));
    }
    spec.validate();
    return spec;
}

json to_json(const DetectionConfig& config) {
    json threshold;
    switch (config.threshold.kind) {
    case ThresholdPolicy::Kind::Fixed:
        threshold = {{"kind", "fixed"}, {"value", config.threshold.value}};
        break;
    case ThresholdPolicy::Kind::PerLength:
        threshold = {{"kind", "per_length"}, {"lambda", config.threshold.value}};
        break;
    case ThresholdPolicy::Kind::Custom:
        throw ConfigError("to_json: custom threshold policies are not serializable");
    }
    return {{"beta", config.beta},
            {"alpha", config.alpha},
            {"epsilon", config.epsilon},
            {"threshold", threshold}};
}

DetectionConfig detection_config_from_json(const json& j) {
    DetectionConfig config;
    config.beta = j.value("beta", 0.05);
    config.alpha = j.value("alpha", 0.95);
    config.epsilon = j.value("epsilon", 0.05);
    if (j.contains("threshold")) {
        const json& t = j.at("threshold");
        const std::string kind = t.at("kind").get<std::string>();
        if (kind == "fixed") {
            config.threshold = ThresholdPolicy::fixed(t.at("value").get<double>());
        } else if (kind == "per_length") {
            config.threshold = ThresholdPolicy::per_length(t.at("lambda").get<double>());
        } else {
            throw ConfigError("unknown threshold policy kind: " + kind);
        }
    }
    config.validate();
    return config;
}

json to_json(const DetectionResult& result, std::size_t n) {
    json estimates = json::array();
    for (const auto& e : result.estimates) {
        estimates.push_back({{"n", e.n}, {"theta", e.theta}});
    }
    json trace = json::array();
    for (const auto& rec : result.decision_trace) {
        const char* verdict = rec.verdict == ScanRecord::Verdict::Stationary ? "stationary"
                              : rec.verdict == ScanRecord::Verdict::Exceed   ? "exceed"
                                                                             : "too_short";
        trace.push_back({{"lo", rec.lo},
                         {"hi", rec.hi},
                         {"argmax", rec.argmax},
                         {"max_value", rec.max_value},
                         {"threshold", rec.threshold},
                         {"verdict", verdict}});
    }
    return {{"N", n},
            {"changepoint_count", result.changepoint_count},
            {"estimates", estimates},
            {"segment_max_stats", result.segment_max_stats},
            {"decision_trace", trace}};
}

json to_json(const SupWaldResult& result) {
    return {{"sup_w", result.degenerate ? json("inf") : json(result.sup_w)},
            {"n0", result.n0},
            {"theta_hat", result.theta_hat},
            {"degenerate", result.degenerate},
            {"skipped_splits", result.skipped_splits}};
}

json to_json(const ThresholdEstimate& estimate) {
    const char* method = estimate.method == ThresholdEstimate::Method::MonteCarlo ? "mc"
                         : estimate.method == ThresholdEstimate::Method::Analytic ? "analytic"
                                                                                  : "limit";
    return {{"level", estimate.level},
            {"value", estimate.value},
            {"method", method},
            {"trials", estimate.trials},
            {"stderr", estimate.stderr_value}};
}

json to_json(const ExperimentReport& report) {
    json j;
    j["threshold_used"] = report.threshold_used;
    j["w_hat"] = report.w_hat;
    j["w_hat_stderr"] = report.w_hat_stderr;
    j["theta_hat_mean"] = report.theta_hat_mean;
    j["theta_hat_stderr"] = report.theta_hat_stderr;
    if (report.delta_rms) {
        j["delta_rms"] = *report.delta_rms;
    } else {
        j["delta_rms"] = nullptr;
    }
    j["trials_used"] = report.trials_used;
    j["qualifying_trials"] = report.qualifying_trials;
    return j;
}

ExperimentConfig experiment_config_from_json(const json& j) {
    ExperimentConfig config;
    config.spec = model_spec_from_json(j.at("spec"));
    config.detection = detection_config_from_json(j.at("detection"));
    const std::string method = j.value("method", "core");
    if (method == "core") {
        config.method = Method::Core;
    } else if (method == "wald") {
        config.method = Method::Wald;
    } else {
        throw ConfigError("unknown method: " + method);
    }
    config.trials = j.value("trials", std::size_t{2000});
    config.seed = j.value("seed", std::uint64_t{1});
    config.workers = j.value("workers", std::size_t{0});
    config.validate();
    return config;
}

std::string sample_to_csv(const Sample& sample) {
    std::string out = "t";
    for (std::size_t i = 1; i <= sample.K; ++i) {
        out += ",x" + std::to_string(i);
    }
    for (std::size_t i = 1; i <= sample.M; ++i) {
        out += ",y" + std::to_string(i);
    }
    out += "\n";
    for (std::size_t n = 1; n <= sample.N; ++n) {
        out += fmt6(static_cast<double>(n) / static_cast<double>(sample.N));
        for (std::size_t i = 0; i < sample.K; ++i) {
            out += ",";
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", sample.X(i, n - 1));
            out += buf;
        }
        for (std::size_t i = 0; i < sample.M; ++i) {
            out += ",";
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", sample.Y(i, n - 1));
            out += buf;
        }
        out += "\n";
    }
    return out;
}

Sample sample_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw ConfigError("sample_from_csv: empty document");
    }
    std::size_t k = 0;
    std::size_t m = 0;
    {
        std::istringstream header(line);
        std::string cell;
        bool first = true;
        while (std::getline(header, cell, ',')) {
            if (first) {
                if (cell != "t") {
                    throw ConfigError("sample_from_csv: first column must be t");
                }
                first = false;
            } else if (!cell.empty() && cell[0] == 'x') {
                ++k;
            } else if (!cell.empty() && cell[0] == 'y') {
                ++m;
            } else {
                throw ConfigError("sample_from_csv: unexpected column " + cell);
            }
        }
    }
    if (k == 0 || m == 0) {
        throw ConfigError("sample_from_csv: need at least one x and one y column");
    }
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        std::vector<double> values;
        while (std::getline(row, cell, ',')) {
            values.push_back(std::stod(cell));
        }
        if (values.size() != 1 + k + m) {
            throw ConfigError("sample_from_csv: wrong column count in a data row");
        }
        rows.push_back(std::move(values));
    }
    const std::size_t n = rows.size();
    if (n == 0) {
        throw ConfigError("sample_from_csv: no data rows");
    }
    Matrix x(k, n);
    Matrix y(m, n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < k; ++i) {
            x(i, r) = rows[r][1 + i];
        }
        for (std::size_t i = 0; i < m; ++i) {
            y(i, r) = rows[r][1 + k + i];
        }
    }
    return Sample{n, k, m, std::move(x), std::move(y)};
}

} // namespace cpd
