#include "cpd/detect.hpp"

#include <cmath>

#include "cpd/errors.hpp"

namespace cpd {

double ThresholdPolicy::threshold_for(std::size_t length) const {
    switch (kind) {
    case Kind::Fixed:
        return value;
    case Kind::PerLength:
        if (length == 0) {
            throw ConfigError("ThresholdPolicy: zero-length range");
        }
        return value / std::sqrt(static_cast<double>(length));
    case Kind::Custom:
        if (!fn) {
            throw ConfigError("ThresholdPolicy: custom policy has no function");
        }
        return fn(length);
    }
    throw ConfigError("ThresholdPolicy: unknown kind");
}

ThresholdPolicy ThresholdPolicy::fixed(double c) {
    ThresholdPolicy p;
    p.kind = Kind::Fixed;
    p.value = c;
    return p;
}

ThresholdPolicy ThresholdPolicy::per_length(double lambda) {
    ThresholdPolicy p;
    p.kind = Kind::PerLength;
    p.value = lambda;
    return p;
}

ThresholdPolicy ThresholdPolicy::custom(std::function<double(std::size_t)> f) {
    ThresholdPolicy p;
    p.kind = Kind::Custom;
    p.fn = std::move(f);
    return p;
}

void DetectionConfig::validate() const {
    if (!(beta >= 0.0 && beta < alpha && alpha <= 1.0)) {
        throw ConfigError("DetectionConfig: need 0 <= beta < alpha <= 1");
    }
    if (epsilon <= 0.0) {
        throw ConfigError("DetectionConfig: epsilon must be positive");
    }
    if (beta > 0.0 && epsilon > std::min(beta, 1.0 - alpha) + 1e-12) {
        throw ConfigError("DetectionConfig: epsilon must not exceed min(beta, 1 - alpha)");
    }
}

namespace {

// Profile with the window start clamped to the first sample, so short internal
// scans stay legal when [beta * len] truncates to zero.
StatProfile scan_profile(const Sample& view, double beta, double alpha) {
    const std::size_t len = view.N;
    double b = beta;
    if (grid_index(b, len) < 1) {
        b = 1.0 / static_cast<double>(len);
    }
    return profile(view, b, alpha);
}

} // namespace

std::pair<bool, StatProfile> detect_single(const Sample& sample, const DetectionConfig& config) {
    config.validate();
    StatProfile prof = scan_profile(sample, config.beta, config.alpha);
    const double c = config.threshold.threshold_for(sample.N);
    return {prof.max_value > c, std::move(prof)};
}

Sample segment_view(const Sample& sample, std::size_t lo, std::size_t hi) {
    if (lo < 1 || lo > hi || hi > sample.N) {
        throw BadRangeError("segment_view: need 1 <= lo <= hi <= N");
    }
    const std::size_t len = hi - lo + 1;
    Matrix x(sample.K, len);
    Matrix y(sample.M, len);
    for (std::size_t j = 0; j < len; ++j) {
        for (std::size_t r = 0; r < sample.K; ++r) {
            x(r, j) = sample.X(r, lo - 1 + j);
        }
        for (std::size_t r = 0; r < sample.M; ++r) {
            y(r, j) = sample.Y(r, lo - 1 + j);
        }
    }
    return Sample{len, sample.K, sample.M, std::move(x), std::move(y)};
}

DetectionResult detect_multiple(const Sample& sample, const DetectionConfig& config) {
    config.validate();
    const std::size_t N = sample.N;
    const std::size_t excl = grid_index(config.epsilon, N); // [eps N]
    if (excl < 2) {
        throw ConfigError("detect_multiple: [epsilon N] must be at least 2");
    }
    const std::size_t min_len = 2 * excl;

    DetectionResult result;

    auto run_scan = [&](std::size_t lo, std::size_t hi) -> ScanRecord {
        ScanRecord rec;
        rec.lo = lo;
        rec.hi = hi;
        const std::size_t len = hi >= lo ? hi - lo + 1 : 0;
        if (len <= min_len) {
            rec.verdict = ScanRecord::Verdict::TooShort;
            result.decision_trace.push_back(rec);
            return rec;
        }
        const StatProfile prof = scan_profile(segment_view(sample, lo, hi), config.beta, config.alpha);
        rec.threshold = config.threshold.threshold_for(len);
        rec.max_value = prof.max_value;
        rec.argmax = lo - 1 + prof.argmax_index;
        rec.verdict = prof.max_value > rec.threshold ? ScanRecord::Verdict::Exceed
                                                     : ScanRecord::Verdict::Stationary;
        result.decision_trace.push_back(rec);
        return rec;
    };

    std::size_t lo = 1;
    while (true) {
        ScanRecord outer = run_scan(lo, N);
        if (outer.verdict != ScanRecord::Verdict::Exceed) {
            break; // remainder is stationary (or too short to scan)
        }
        // Shrink the right boundary until the left piece no longer exceeds;
        // the emission lands at the piece's right end + [eps N].
        std::size_t cur_hi = outer.argmax >= excl ? outer.argmax - excl : 0;
        while (true) {
            ScanRecord inner = run_scan(lo, cur_hi);
            if (inner.verdict == ScanRecord::Verdict::Exceed) {
                cur_hi = inner.argmax >= excl ? inner.argmax - excl : 0;
                continue;
            }
            break;
        }
        const std::size_t estimate = cur_hi + excl;
        result.estimates.push_back(
            {estimate, static_cast<double>(estimate) / static_cast<double>(N)});
        lo = estimate + excl;
        if (lo > N) {
            break;
        }
    }

    result.changepoint_count = result.estimates.size();

    // Diagnostics: max statistic of each final between-change segment.
    std::size_t seg_lo = 1;
    for (std::size_t i = 0; i <= result.estimates.size(); ++i) {
        const std::size_t seg_hi = i < result.estimates.size() ? result.estimates[i].n : N;
        double max_stat = 0.0;
        if (seg_hi >= seg_lo && seg_hi - seg_lo + 1 > min_len) {
            max_stat =
                scan_profile(segment_view(sample, seg_lo, seg_hi), config.beta, config.alpha)
                    .max_value;
        }
        result.segment_max_stats.push_back(max_stat);
        seg_lo = seg_hi + 1;
        if (seg_lo > N) {
            break;
        }
    }
    return result;
}

} // namespace cpd
