#include <doctest.h>

#include <cmath>

#include "cpd/errors.hpp"
#include "cpd/experiment.hpp"
#include "cpd/json_io.hpp"

using namespace cpd;

TEST_CASE("run_experiment on a zero-noise change spec detects every trial") {
    ExperimentConfig config;
    config.spec = bundled_deterministic_spec(200, 0.4, 0.3);
    config.spec.noise = NoiseModel::iid({0.0});
    config.detection.threshold = ThresholdPolicy::fixed(0.01);
    config.trials = 20;
    config.seed = 5;
    const ExperimentReport report = run_experiment(config);
    CHECK(report.w_hat == 0.0);
    REQUIRE(report.theta_hat_mean.size() == 1);
    CHECK(report.theta_hat_mean[0] == doctest::Approx(0.3).epsilon(0.01));
    CHECK(report.qualifying_trials == 20);
}

TEST_CASE("parallel equals serial: identical reports and trial records") {
    ExperimentConfig config;
    config.spec = bundled_deterministic_spec(300, 0.4, 0.3);
    config.detection.threshold = ThresholdPolicy::fixed(0.15);
    config.trials = 64;
    config.seed = 17;

    config.workers = 1;
    const ExperimentReport serial = run_experiment(config);
    config.workers = 4;
    const ExperimentReport parallel = run_experiment(config);

    CHECK(serial.w_hat == parallel.w_hat);
    CHECK(serial.theta_hat_mean == parallel.theta_hat_mean);
    REQUIRE(serial.per_trial_records.size() == parallel.per_trial_records.size());
    for (std::size_t i = 0; i < serial.per_trial_records.size(); ++i) {
        CHECK(serial.per_trial_records[i].statistic == parallel.per_trial_records[i].statistic);
        CHECK(serial.per_trial_records[i].theta_hat == parallel.per_trial_records[i].theta_hat);
    }
}

TEST_CASE("reproduce_table is byte-deterministic") {
    const std::string a = reproduce_table(TableId::T3, 0.05, 42, 1);
    const std::string b = reproduce_table(TableId::T3, 0.05, 42, 4);
    CHECK(a == b);
}

TEST_CASE("reproduce_table smoke layout") {
    const std::string t3 = reproduce_table(TableId::T3, 0.05, 1, 0);
    CHECK(t3.find("metric,N100,N200,N300,N400,N500,N700,N1000,N1200") == 0);
    CHECK(t3.find("p095,") != std::string::npos);
    CHECK(t3.find("p099_stderr,") != std::string::npos);

    const std::string t9 = reproduce_table(TableId::T9, 0.05, 1, 0);
    CHECK(t9.find("metric,N200,N400,N500,N700,N900,N1000,N1200,N1500") == 0);
    CHECK(t9.find("\nw,") != std::string::npos);
    CHECK(t9.find("\ndelta,") != std::string::npos);
}

TEST_CASE("table ids parse and unknown ids are rejected") {
    CHECK(parse_table_id("T1") == TableId::T1);
    CHECK(parse_table_id("t9") == TableId::T9);
    CHECK_THROWS_AS(parse_table_id("T10"), UnknownTableError);
    CHECK_THROWS_AS(parse_table_id("X2"), UnknownTableError);
}

TEST_CASE("wald experiments aggregate the baseline statistic") {
    ExperimentConfig config;
    config.spec = bundled_deterministic_spec(300, 0.4, 0.3);
    config.detection.threshold = ThresholdPolicy::fixed(8.0);
    config.method = Method::Wald;
    config.trials = 40;
    config.seed = 23;
    const ExperimentReport report = run_experiment(config);
    CHECK(report.trials_used == 40);
    CHECK(report.w_hat >= 0.0);
    CHECK(report.w_hat <= 1.0);
    for (const auto& rec : report.per_trial_records) {
        CHECK(rec.statistic >= 0.0);
    }
}

TEST_CASE("multi-change experiment reports count errors and conditional deltas") {
    ExperimentConfig config;
    config.spec = bundled_ses_spec(400, true);
    config.detection.threshold = ThresholdPolicy::per_length(0.19 * std::sqrt(400.0));
    config.trials = 30;
    config.seed = 31;
    const ExperimentReport report = run_experiment(config);
    CHECK(report.trials_used == 30);
    if (report.qualifying_trials > 0) {
        REQUIRE(report.theta_hat_mean.size() == 2);
        CHECK(report.delta_rms.has_value());
        CHECK(*report.delta_rms >= 0.0);
    }
}

TEST_CASE("model spec json round trip") {
    const ModelSpec spec = bundled_deterministic_spec(500, 0.4, 0.3);
    const json j = to_json(spec);
    const ModelSpec back = model_spec_from_json(j);
    CHECK(back.N == spec.N);
    CHECK(back.plan.functions.size() == 2);
    CHECK(back.coeffs.segments.size() == 2);
    CHECK(back.coeffs.segments[0].theta == doctest::Approx(0.3));
    const Sample a = simulate(spec, 9);
    const Sample b = simulate(back, 9);
    CHECK(frobenius_norm(a.Y - b.Y) == 0.0);

    const ModelSpec ses = bundled_ses_spec(100, true);
    const ModelSpec ses_back = model_spec_from_json(to_json(ses));
    const Sample sa = simulate(ses, 4);
    const Sample sb = simulate(ses_back, 4);
    CHECK(frobenius_norm(sa.Y - sb.Y) == 0.0);
}

TEST_CASE("detection config json round trip") {
    DetectionConfig config;
    config.beta = 0.1;
    config.alpha = 0.9;
    config.epsilon = 0.04;
    config.threshold = ThresholdPolicy::per_length(3.3);
    const DetectionConfig back = detection_config_from_json(to_json(config));
    CHECK(back.beta == doctest::Approx(0.1));
    CHECK(back.threshold.kind == ThresholdPolicy::Kind::PerLength);
    CHECK(back.threshold.value == doctest::Approx(3.3));
}

TEST_CASE("sample csv round trip") {
    const Sample s = simulate(bundled_deterministic_spec(40, 0.4, 0.3), 3);
    const std::string csv = sample_to_csv(s);
    CHECK(csv.rfind("t,x1,x2,y1\n", 0) == 0);
    const Sample back = sample_from_csv(csv);
    REQUIRE(back.N == s.N);
    REQUIRE(back.K == s.K);
    REQUIRE(back.M == s.M);
    CHECK(frobenius_norm(back.X - s.X) < 1e-12);
    CHECK(frobenius_norm(back.Y - s.Y) < 1e-12);
}

TEST_CASE("experiment config json parsing") {
    json j;
    j["spec"] = to_json(bundled_deterministic_spec(200, 0.4, 0.3));
    j["detection"] = {{"beta", 0.05},
                      {"alpha", 0.95},
                      {"epsilon", 0.05},
                      {"threshold", {{"kind", "fixed"}, {"value", 0.2}}}};
    j["method"] = "core";
    j["trials"] = 50;
    j["seed"] = 7;
    const ExperimentConfig config = experiment_config_from_json(j);
    CHECK(config.trials == 50);
    CHECK(config.method == Method::Core);
    CHECK(config.spec.N == 200);
    const ExperimentReport report = run_experiment(config);
    CHECK(report.trials_used == 50);
}
