#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpd/detect.hpp"
#include "cpd/model.hpp"

namespace cpd {

enum class Method { Core, Wald };

struct ExperimentConfig {
    ModelSpec spec;
    DetectionConfig detection;
    Method method = Method::Core;
    std::size_t trials = 2000;
    std::uint64_t seed = 1;
    std::size_t workers = 0;
    bool keep_trials = true;

    void validate() const;
};

/// One Monte Carlo trial, compact. Single-change runs fill detected /
/// theta_hat / statistic; multi-change runs fill k_hat / thetas.
struct TrialRecord {
    bool detected = false;
    double statistic = 0.0; // profile max or SupW value
    double theta_hat = 0.0; // argmax estimate (single-change runs)
    std::size_t k_hat = 0;
    std::vector<double> thetas; // multi-change estimates
};

struct ExperimentReport {
    double threshold_used = 0.0;
    /// Single-change runs: non-detection frequency. Multi-change runs:
    /// frequency of a wrong change count. Stationary runs: false-alarm
    /// frequency.
    double w_hat = 0.0;
    double w_hat_stderr = 0.0;
    /// Mean estimate(s), conditional on detection (single change) or on the
    /// correct count (multiple changes). Empty when no trial qualifies.
    std::vector<double> theta_hat_mean;
    double theta_hat_stderr = 0.0;
    /// Multi-change runs: mean of sqrt(sum_i (theta_hat_i - theta_i)^2) over
    /// trials with the correct count; unset otherwise.
    std::optional<double> delta_rms;
    std::size_t trials_used = 0;
    std::size_t qualifying_trials = 0;
    std::vector<TrialRecord> per_trial_records; // filled when keep_trials

    void clear_details() { per_trial_records.clear(); }
};

/// Runs `trials` seeded simulations of the spec, applies the configured
/// detector, and aggregates. Deterministic given (config, seed); worker count
/// never changes the result (per-trial seed streams, index-ordered fold).
ExperimentReport run_experiment(const ExperimentConfig& config);

enum class TableId { T1, T2, T3, T4, T5, T6, T7, T8, T9 };

TableId parse_table_id(const std::string& id);

/// Emits the bundled experiment preset `id` as a CSV document: same
/// row/column layout as the preset's summary table plus stderr rows. `scale`
/// multiplies the 2000-trial baseline (smoke runs use small scales).
std::string reproduce_table(TableId id, double scale, std::uint64_t seed,
                            std::size_t workers = 0);

// Bundled generative presets shared by the tables and the acceptance suite.

/// Deterministic two-channel plan (intercept plus an oscillating seasonal
/// channel) used by the deterministic-plan presets.
RegressionPlan bundled_deterministic_plan();

/// y = c0 + c1 x + noise on the bundled deterministic plan; the intercept
/// shifts from 0 to `intercept_shift` at `theta` (stationary when the shift
/// is zero).
ModelSpec bundled_deterministic_spec(std::size_t N, double intercept_shift, double theta);

/// y = c0 + c1 x + noise with an AR(1) predictor (rho = 0.3, x_0 = 0); the
/// slope moves from 1 to `slope_after` at `theta` (stationary when 1).
ModelSpec bundled_ar1_spec(std::size_t N, double slope_after, double theta);

/// Two-equation simultaneous system preset; `with_changes` adds the two
/// regime switches at theta = 0.3 and 0.7.
ModelSpec bundled_ses_spec(std::size_t N, bool with_changes);

} // namespace cpd
