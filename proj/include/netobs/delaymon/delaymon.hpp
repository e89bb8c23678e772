#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace netobs::delaymon {

/// (p, c) precision requirement: the true parameter lies inside a
/// relative interval of width c around the estimate with probability p.
struct PrecisionRequirement {
    double p = 0.9;   // precision probability, in (0,1)
    double c = 0.1;   // relative interval size, > 0
};

struct BatchStats {
    std::uint64_t n = 0;
    double mean = 0;
    double var = 0;  // sample variance (n-1 denominator)

    static BatchStats from(std::span<const double> samples);
    double stddev() const;
};

class DegenerateInit : public std::runtime_error {
public:
    DegenerateInit() : std::runtime_error("initial batch has non-positive mean or n < 2") {}
};
class StreamExhausted : public std::runtime_error {
public:
    StreamExhausted() : std::runtime_error("delay stream exhausted") {}
};
class InsufficientSamples : public std::runtime_error {
public:
    InsufficientSamples() : std::runtime_error("need n >= 2 samples") {}
};

/// When set, the small-sample correction term delta reads the log in its
/// defining expression as log10 instead of the default natural log.
struct PrecisionOptions {
    bool log10_delta = false;
};

/// Number of further samples H needed to hit the (p, c) requirement
/// given initial batch statistics.
std::uint64_t required_samples(const PrecisionRequirement& req,
                               const BatchStats& init,
                               const PrecisionOptions& opts = {});

struct PrecisionEstimate {
    double mean = 0;
    double lo = 0;
    double hi = 0;
    std::uint64_t samples_used = 0;
};

/// Adaptive two-phase mean estimation: draw init_n samples, derive H,
/// draw H more, return their mean with the relative (p, c) interval.
/// The stream returns nullopt when exhausted.
PrecisionEstimate estimate_mean(const std::function<std::optional<double>()>& stream,
                                const PrecisionRequirement& req,
                                std::uint64_t init_n = 20,
                                const PrecisionOptions& opts = {});

/// Change-detection requirement: false alarms below 1 - p_M, changes of
/// relative magnitude at least |c_M - 1| detected with probability q_M.
struct ChangeRequirement {
    double p_M = 0.95;
    double q_M = 0.99;
    double c_M = 1.05;
};

struct Interval {
    double lo = 0;
    double hi = 0;
    bool contains(double x) const { return x >= lo && x <= hi; }
};

/// No-change acceptance interval for the next batch mean, centred on the
/// reference mean. Width scales with the standard error of both batch
/// means so the false-alarm bound holds for any batch size.
Interval mean_change_interval(const BatchStats& ref, double p_M,
                              std::uint64_t next_n = 0);

/// Per-batch sample count for the (p_M, q_M, c_M) requirement,
/// alpha = mean^2 / variance of the reference batch. A zero-variance
/// reference is degenerate: returns 1 and sets *degenerate.
std::uint64_t mean_change_samples(const ChangeRequirement& req,
                                  const BatchStats& ref,
                                  bool* degenerate = nullptr);

/// No-change acceptance interval for the next batch variance
/// (chi-square ratio bound around the reference variance).
Interval variance_change_interval(const BatchStats& ref, double p_M);

enum class Verdict { Training, NoChange, MeanChange, VarianceChange };

const char* to_string(Verdict v);

struct DetectResult {
    Verdict verdict = Verdict::Training;
    bool estimation_completed = false;  // a full batch comparison ran
    std::uint64_t batch_n = 0;          // size of the compared batch
};

/// Two-phase mean/variance change detector. Training accumulates
/// samples until the Eq-derived batch size is reached and freezes the
/// reference; Ready compares same-size batches against the reference
/// intervals. Any reported change re-enters Training.
class ChangeDetector {
public:
    explicit ChangeDetector(const ChangeRequirement& req,
                            std::uint64_t init_n = 20, bool check_variance = true);

    DetectResult detect(std::span<const double> batch);

    bool ready() const { return phase_ == Phase::Ready; }
    std::uint64_t required_n() const { return required_n_; }
    const BatchStats& reference() const { return reference_; }
    Interval mean_interval() const { return mean_interval_; }
    Interval variance_interval() const { return var_interval_; }

private:
    enum class Phase { Training, Ready };

    ChangeRequirement req_;
    std::uint64_t init_n_;
    bool check_variance_;

    Phase phase_ = Phase::Training;
    std::vector<double> buffer_;
    BatchStats reference_;
    std::uint64_t required_n_ = 0;
    Interval mean_interval_;
    Interval var_interval_;

    void adopt_reference(const BatchStats& stats);
    void retrain();
};

} // namespace netobs::delaymon
