#include "cpd/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cpd/baseline.hpp"
#include "cpd/calibrate.hpp"
#include "cpd/errors.hpp"
#include "cpd/parallel.hpp"
#include "cpd/rng.hpp"
#include "cpd/stat.hpp"

namespace cpd {

namespace {

double binomial_stderr(double p, std::size_t n) {
    if (n == 0) {
        return 0.0;
    }
    return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

} // namespace

void ExperimentConfig::validate() const {
    spec.validate();
    detection.validate();
    if (trials < 1) {
        throw ConfigError("ExperimentConfig: at least one trial required");
    }
    if (method == Method::Wald && spec.coeffs.segments.size() > 2) {
        throw ConfigError("ExperimentConfig: the Wald baseline handles at most one change");
    }
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    const std::size_t segments = config.spec.coeffs.segments.size();
    const bool multi = segments > 2;
    const std::size_t n = config.spec.N;

    ExperimentReport report;
    report.threshold_used = config.detection.threshold.threshold_for(n);
    report.trials_used = config.trials;

    std::vector<TrialRecord> records(config.trials);
    parallel_for(config.trials, config.workers, [&](std::size_t i) {
        const Sample sample = simulate(config.spec, trial_seed(config.seed, i));
        TrialRecord& rec = records[i];
        if (multi) {
            const DetectionResult det = detect_multiple(sample, config.detection);
            rec.k_hat = det.changepoint_count;
            rec.thetas.reserve(det.estimates.size());
            for (const auto& e : det.estimates) {
                rec.thetas.push_back(e.theta);
            }
        } else if (config.method == Method::Core) {
            auto [detected, prof] = detect_single(sample, config.detection);
            rec.detected = detected;
            rec.statistic = prof.max_value;
            rec.theta_hat = prof.theta_hat;
        } else {
            const SupWaldResult w =
                sup_wald(sample.X, sample.Y, config.detection.beta, config.detection.alpha);
            rec.statistic = w.sup_w;
            rec.theta_hat = w.theta_hat;
            rec.detected = w.sup_w > report.threshold_used;
        }
    });

    if (multi) {
        const std::size_t true_k = segments - 1;
        std::vector<double> true_thetas;
        for (std::size_t s = 0; s + 1 < segments; ++s) {
            true_thetas.push_back(config.spec.coeffs.segments[s].theta);
        }
        std::size_t correct = 0;
        std::vector<double> theta_sums(true_k, 0.0);
        double delta_sum = 0.0;
        for (const TrialRecord& rec : records) {
            if (rec.k_hat != true_k) {
                continue;
            }
            ++correct;
            double sq = 0.0;
            for (std::size_t j = 0; j < true_k; ++j) {
                theta_sums[j] += rec.thetas[j];
                const double d = rec.thetas[j] - true_thetas[j];
                sq += d * d;
            }
            delta_sum += std::sqrt(sq);
        }
        report.qualifying_trials = correct;
        report.w_hat = 1.0 -
            static_cast<double>(correct) / static_cast<double>(config.trials);
        report.w_hat_stderr = binomial_stderr(report.w_hat, config.trials);
        if (correct > 0) {
            for (double s : theta_sums) {
                report.theta_hat_mean.push_back(s / static_cast<double>(correct));
            }
            report.delta_rms = delta_sum / static_cast<double>(correct);
        }
    } else {
        std::size_t detections = 0;
        double theta_sum = 0.0;
        double theta_sq_sum = 0.0;
        for (const TrialRecord& rec : records) {
            if (!rec.detected) {
                continue;
            }
            ++detections;
            theta_sum += rec.theta_hat;
            theta_sq_sum += rec.theta_hat * rec.theta_hat;
        }
        report.qualifying_trials = detections;
        const double detect_rate =
            static_cast<double>(detections) / static_cast<double>(config.trials);
        // Stationary spec: report the false-alarm rate; otherwise the miss rate.
        report.w_hat = segments == 1 ? detect_rate : 1.0 - detect_rate;
        report.w_hat_stderr = binomial_stderr(report.w_hat, config.trials);
        if (detections > 0) {
            const double mean = theta_sum / static_cast<double>(detections);
            report.theta_hat_mean.push_back(mean);
            const double var = std::max(
                0.0, theta_sq_sum / static_cast<double>(detections) - mean * mean);
            report.theta_hat_stderr = std::sqrt(var / static_cast<double>(detections));
        }
    }

    if (config.keep_trials) {
        report.per_trial_records = std::move(records);
    }
    return report;
}

TableId parse_table_id(const std::string& id) {
    if (id.size() == 2 && (id[0] == 'T' || id[0] == 't') && id[1] >= '1' && id[1] <= '9') {
        return static_cast<TableId>(id[1] - '1');
    }
    throw UnknownTableError("unknown table id: " + id);
}

// ---------------------------------------------------------------------------
// Bundled presets
// ---------------------------------------------------------------------------

namespace {

// Oscillating seasonal channel: mean 2.2, amplitude 1.1, 10 cycles. The scale
// was calibrated once against the stationary-threshold preset (T3) so the
// bundled detection presets share one plan.
constexpr double kPlanMean = 2.2;
constexpr double kPlanAmp = 1.1;
constexpr double kPlanFreq = 10.0;

const std::vector<SesSegment> kSesRegimes = {
    {0.3, {0.1, 0.5, 0.3, 0.7, 0.2, 0.4, 0.6}},
    {0.7, {0.1, 0.5, 0.0, 0.7, 0.2, 0.4, 0.6}},
    {1.0, {0.1, 0.5, 0.0, 0.7, 0.2, 0.4, 0.9}},
};

} // namespace

RegressionPlan bundled_deterministic_plan() {
    return RegressionPlan::deterministic(
        {PlanFunction::constant(1.0), PlanFunction::cosine(kPlanMean, kPlanAmp, kPlanFreq)});
}

ModelSpec bundled_deterministic_spec(std::size_t N, double intercept_shift, double theta) {
    ModelSpec spec;
    spec.N = N;
    spec.plan = bundled_deterministic_plan();
    const Matrix before = Matrix::from_rows({{0.0, 1.0}});
    if (intercept_shift == 0.0) {
        spec.coeffs = PiecewiseCoefficients::single(before);
    } else {
        spec.coeffs = PiecewiseCoefficients::two(
            before, theta, Matrix::from_rows({{intercept_shift, 1.0}}));
    }
    spec.noise = NoiseModel::iid({1.0});
    return spec;
}

ModelSpec bundled_ar1_spec(std::size_t N, double slope_after, double theta) {
    ModelSpec spec;
    spec.N = N;
    spec.plan = RegressionPlan::ar1(0.3, 1.0, true);
    const Matrix before = Matrix::from_rows({{0.0, 1.0}});
    if (slope_after == 1.0) {
        spec.coeffs = PiecewiseCoefficients::single(before);
    } else {
        spec.coeffs =
            PiecewiseCoefficients::two(before, theta, Matrix::from_rows({{0.0, slope_after}}));
    }
    spec.noise = NoiseModel::iid({1.0});
    return spec;
}

ModelSpec bundled_ses_spec(std::size_t N, bool with_changes) {
    if (with_changes) {
        return make_ses_spec(kSesRegimes, N);
    }
    return make_ses_spec({{1.0, kSesRegimes.front().u}}, N);
}

// ---------------------------------------------------------------------------
// Table rendering
// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) {
        return "";
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

class TableWriter {
public:
    explicit TableWriter(const std::vector<std::size_t>& ns) {
        header_ = "metric";
        for (std::size_t n : ns) {
            header_ += ",N" + std::to_string(n);
        }
    }

    void row(const std::string& name, const std::vector<double>& values) {
        std::string line = name;
        for (double v : values) {
            line += "," + fmt(v);
        }
        rows_.push_back(std::move(line));
    }

    std::string str() const {
        std::string out = header_ + "\n";
        for (const auto& r : rows_) {
            out += r + "\n";
        }
        return out;
    }

private:
    std::string header_;
    std::vector<std::string> rows_;
};

std::size_t scaled_trials(double scale) {
    if (!(scale > 0.0 && scale <= 1.0)) {
        throw ConfigError("reproduce_table: scale must be in (0, 1]");
    }
    return std::max<std::size_t>(100, static_cast<std::size_t>(std::lround(2000.0 * scale)));
}

constexpr double kBeta = 0.05;
constexpr double kAlpha = 0.95;

std::uint64_t cell_seed(std::uint64_t seed, std::size_t table, std::size_t cell) {
    return derive_stream(seed, 0x54B1 + table * 1024 + cell);
}

// Wald maxima on stationary samples of the deterministic preset.
std::vector<double> wald_maxima(std::size_t n, std::size_t trials, std::uint64_t seed,
                                std::size_t workers) {
    const ModelSpec spec = bundled_deterministic_spec(n, 0.0, 0.0);
    std::vector<double> maxima(trials, 0.0);
    parallel_for(trials, workers, [&](std::size_t i) {
        const Sample sample = simulate(spec, trial_seed(seed, i));
        maxima[i] = sup_wald(sample.X, sample.Y, kBeta, kAlpha).sup_w;
    });
    return maxima;
}

std::string threshold_table(const std::vector<std::size_t>& ns,
                            const std::function<std::vector<double>(std::size_t, std::uint64_t)>&
                                maxima_for,
                            std::uint64_t seed, std::size_t table_tag) {
    TableWriter out(ns);
    std::vector<double> p95, p95_se, p99, p99_se;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        std::vector<double> maxima = maxima_for(ns[i], cell_seed(seed, table_tag, i));
        std::sort(maxima.begin(), maxima.end());
        p95.push_back(empirical_quantile(maxima, 0.95));
        p99.push_back(empirical_quantile(maxima, 0.99));
        p95_se.push_back(quantile_stderr(maxima, 0.95));
        p99_se.push_back(quantile_stderr(maxima, 0.99));
    }
    out.row("p095", p95);
    out.row("p095_stderr", p95_se);
    out.row("p099", p99);
    out.row("p099_stderr", p99_se);
    return out.str();
}

struct DetectionRows {
    std::vector<double> threshold, w_hat, w_se, theta_mean, theta_se;
};

// One detection row set: per N, calibrate the 95% threshold on the stationary
// sibling spec, then run the change spec against it.
DetectionRows detection_rows(const std::vector<std::size_t>& ns,
                             const std::function<ModelSpec(std::size_t)>& stationary,
                             const std::function<ModelSpec(std::size_t)>& with_change,
                             Method method, std::size_t trials, std::uint64_t seed,
                             std::size_t table_tag, std::size_t workers) {
    DetectionRows rows;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const std::size_t n = ns[i];
        const std::uint64_t calib_seed = cell_seed(seed, table_tag, 2 * i);
        const std::uint64_t run_seed = cell_seed(seed, table_tag, 2 * i + 1);

        double c = 0.0;
        if (method == Method::Core) {
            c = mc_threshold(stationary(n), 0.95, trials, kBeta, kAlpha, calib_seed, workers)
                    .value;
        } else {
            std::vector<double> maxima = wald_maxima(n, trials, calib_seed, workers);
            c = empirical_quantile(std::move(maxima), 0.95);
        }

        ExperimentConfig config;
        config.spec = with_change(n);
        config.detection.beta = kBeta;
        config.detection.alpha = kAlpha;
        config.detection.threshold = ThresholdPolicy::fixed(c);
        config.method = method;
        config.trials = trials;
        config.seed = run_seed;
        config.workers = workers;
        config.keep_trials = false;
        const ExperimentReport report = run_experiment(config);

        rows.threshold.push_back(c);
        rows.w_hat.push_back(report.w_hat);
        rows.w_se.push_back(report.w_hat_stderr);
        rows.theta_mean.push_back(
            report.theta_hat_mean.empty() ? std::nan("") : report.theta_hat_mean.front());
        rows.theta_se.push_back(report.theta_hat_mean.empty() ? std::nan("")
                                                              : report.theta_hat_stderr);
    }
    return rows;
}

void append_detection_rows(TableWriter& out, const std::string& prefix,
                           const DetectionRows& rows) {
    out.row(prefix + "_C", rows.threshold);
    out.row(prefix + "_w_hat", rows.w_hat);
    out.row(prefix + "_w_hat_stderr", rows.w_se);
    out.row(prefix + "_theta_mean", rows.theta_mean);
    out.row(prefix + "_theta_mean_stderr", rows.theta_se);
}

// Standard error of the mean per-trial delta over trials with the right count.
double conditional_delta_stderr(const ExperimentReport& report,
                                const std::vector<double>& true_thetas) {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t count = 0;
    for (const auto& rec : report.per_trial_records) {
        if (rec.k_hat != true_thetas.size()) {
            continue;
        }
        double sq = 0.0;
        for (std::size_t j = 0; j < true_thetas.size(); ++j) {
            const double d = rec.thetas[j] - true_thetas[j];
            sq += d * d;
        }
        const double delta = std::sqrt(sq);
        sum += delta;
        sum_sq += delta * delta;
        ++count;
    }
    if (count < 2) {
        return std::nan("");
    }
    const double mean = sum / static_cast<double>(count);
    const double var = std::max(0.0, sum_sq / static_cast<double>(count) - mean * mean);
    return std::sqrt(var / static_cast<double>(count));
}

} // namespace

std::string reproduce_table(TableId id, double scale, std::uint64_t seed, std::size_t workers) {
    const std::size_t trials = scaled_trials(scale);
    const std::vector<std::size_t> threshold_ns = {100, 200, 300, 400, 500, 700, 1000, 1200};
    const std::vector<std::size_t> detect_ns = {300, 400, 500, 700, 1000};
    const std::vector<std::size_t> ar_detect_ns = {500, 700, 1000, 1200};
    const std::vector<std::size_t> ses_ns = {200, 400, 500, 700, 900, 1000, 1200, 1500};

    switch (id) {
    case TableId::T1:
        return threshold_table(
            threshold_ns,
            [&](std::size_t n, std::uint64_t s) { return wald_maxima(n, trials, s, workers); },
            seed, 1);
    case TableId::T3:
        return threshold_table(
            threshold_ns,
            [&](std::size_t n, std::uint64_t s) {
                return mc_profile_maxima(bundled_deterministic_spec(n, 0.0, 0.0), trials, kBeta,
                                         kAlpha, s, workers);
            },
            seed, 3);
    case TableId::T6:
        return threshold_table(
            threshold_ns,
            [&](std::size_t n, std::uint64_t s) {
                return mc_profile_maxima(bundled_ar1_spec(n, 1.0, 0.0), trials, kBeta, kAlpha, s,
                                         workers);
            },
            seed, 6);
    case TableId::T8:
        return threshold_table(
            ses_ns,
            [&](std::size_t n, std::uint64_t s) {
                return mc_profile_maxima(bundled_ses_spec(n, false), trials, kBeta, kAlpha, s,
                                         workers);
            },
            seed, 8);
    case TableId::T2:
    case TableId::T4: {
        const Method method = id == TableId::T2 ? Method::Wald : Method::Core;
        TableWriter out(detect_ns);
        std::size_t tag = id == TableId::T2 ? 2 : 4;
        for (double delta : {0.3, 0.4}) {
            const DetectionRows rows = detection_rows(
                detect_ns, [](std::size_t n) { return bundled_deterministic_spec(n, 0.0, 0.0); },
                [delta](std::size_t n) { return bundled_deterministic_spec(n, delta, 0.3); },
                method, trials, seed, tag, workers);
            append_detection_rows(out, "delta" + fmt(delta), rows);
            tag += 16;
        }
        return out.str();
    }
    case TableId::T5: {
        TableWriter out(detect_ns);
        std::size_t tag = 5;
        for (double delta : {0.3, 0.4}) {
            const DetectionRows rows = detection_rows(
                detect_ns, [](std::size_t n) { return bundled_deterministic_spec(n, 0.0, 0.0); },
                [delta](std::size_t n) { return bundled_deterministic_spec(n, delta, 0.5); },
                Method::Core, trials, seed, tag, workers);
            append_detection_rows(out, "delta" + fmt(delta), rows);
            tag += 16;
        }
        return out.str();
    }
    case TableId::T7: {
        TableWriter out(ar_detect_ns);
        std::size_t tag = 7;
        for (double theta : {0.5, 0.3}) {
            const DetectionRows rows = detection_rows(
                ar_detect_ns, [](std::size_t n) { return bundled_ar1_spec(n, 1.0, 0.0); },
                [theta](std::size_t n) { return bundled_ar1_spec(n, 1.3, theta); }, Method::Core,
                trials, seed, tag, workers);
            append_detection_rows(out, "theta" + fmt(theta), rows);
            tag += 16;
        }
        return out.str();
    }
    case TableId::T9: {
        TableWriter out(ses_ns);
        std::vector<double> w, w_se, delta, delta_se, c_row;
        for (std::size_t i = 0; i < ses_ns.size(); ++i) {
            const std::size_t n = ses_ns[i];
            const double c95 = mc_threshold(bundled_ses_spec(n, false), 0.95, trials, kBeta,
                                            kAlpha, cell_seed(seed, 9, 2 * i), workers)
                                   .value;
            ExperimentConfig config;
            config.spec = bundled_ses_spec(n, true);
            config.detection.beta = kBeta;
            config.detection.alpha = kAlpha;
            config.detection.epsilon = 0.05;
            config.detection.threshold =
                ThresholdPolicy::per_length(c95 * std::sqrt(static_cast<double>(n)));
            config.method = Method::Core;
            config.trials = trials;
            config.seed = cell_seed(seed, 9, 2 * i + 1);
            config.workers = workers;
            config.keep_trials = true;
            const ExperimentReport report = run_experiment(config);
            c_row.push_back(c95);
            w.push_back(report.w_hat);
            w_se.push_back(report.w_hat_stderr);
            delta.push_back(report.delta_rms.value_or(std::nan("")));
            delta_se.push_back(conditional_delta_stderr(report, {0.3, 0.7}));
        }
        out.row("C", c_row);
        out.row("w", w);
        out.row("w_stderr", w_se);
        out.row("delta", delta);
        out.row("delta_stderr", delta_se);
        return out.str();
    }
    }
    throw UnknownTableError("reproduce_table: unhandled table id");
}

} // namespace cpd
