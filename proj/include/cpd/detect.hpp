#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cpd/model.hpp"
#include "cpd/stat.hpp"

namespace cpd {

/// Decision threshold as a function of sample (or sub-sample) length.
/// Fixed: constant C. PerLength: C(L) = lambda / sqrt(L), the practical
/// scaling law; lambda is usually back-solved from one Monte Carlo
/// calibration run as C_mc(N) * sqrt(N).
struct ThresholdPolicy {
    enum class Kind { Fixed, PerLength, Custom };

    Kind kind = Kind::Fixed;
    double value = 0.0;
    std::function<double(std::size_t)> fn;

    double threshold_for(std::size_t length) const;

    static ThresholdPolicy fixed(double c);
    static ThresholdPolicy per_length(double lambda);
    static ThresholdPolicy custom(std::function<double(std::size_t)> f);
};

struct DetectionConfig {
    double beta = 0.05;
    double alpha = 0.95;
    double epsilon = 0.05; // exclusion half-width of the multi-change scan
    ThresholdPolicy threshold;

    void validate() const;
};

struct ScanRecord {
    enum class Verdict { Stationary, Exceed, TooShort };

    std::size_t lo = 0; // global 1-based range scanned
    std::size_t hi = 0;
    std::size_t argmax = 0; // global index of the scan's argmax (0 when TooShort)
    double max_value = 0.0;
    double threshold = 0.0;
    Verdict verdict = Verdict::Stationary;
};

struct ChangePointEstimate {
    std::size_t n = 0;  // global 1-based sample index
    double theta = 0.0; // n / N
};

struct DetectionResult {
    std::size_t changepoint_count = 0;
    std::vector<ChangePointEstimate> estimates;
    // Max statistic of each final between-change segment, rescanned in
    // isolation (diagnostic; segments shorter than the scan minimum get 0).
    std::vector<double> segment_max_stats;
    std::vector<ScanRecord> decision_trace;
};

/// Single change-point decision: detected iff the profile max exceeds the
/// policy threshold at the full sample length. The profile is returned for
/// diagnostics either way.
std::pair<bool, StatProfile> detect_single(const Sample& sample, const DetectionConfig& config);

/// Multiple change-point scan. Isolates the leftmost change first: while the
/// current range exceeds its threshold, the right boundary shrinks to
/// (argmax - [eps N]); once the remaining left piece is stationary or shorter
/// than [2 eps N], the estimate is emitted at the piece's right end + [eps N]
/// and the scan restarts [eps N] past the emission. Each emission advances the
/// left boundary by at least [eps N], so the recursion terminates.
DetectionResult detect_multiple(const Sample& sample, const DetectionConfig& config);

/// Contiguous sub-sample [lo, hi] (1-based, inclusive); statistics computed on
/// it treat its length as its own N.
Sample segment_view(const Sample& sample, std::size_t lo, std::size_t hi);

} // namespace cpd
