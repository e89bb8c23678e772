#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

namespace netobs::ratemon {

/// Running first/second statistical moments of rate samples (bits/s).
struct MomentCounter {
    double s1_acc = 0;  // sum of samples
    double s2_acc = 0;  // sum of squared samples
    std::uint64_t n = 0;

    void update(double rate_sample);
    void reset() { *this = MomentCounter{}; }
};

/// Log-normal rate model fitted from raw moments.
struct LogNormalModel {
    double mu = 0;
    double sigma = 0;
    std::uint64_t n_used = 0;
};

class InsufficientSamples : public std::runtime_error {
public:
    InsufficientSamples() : std::runtime_error("fit requires n >= 2") {}
};
class NonPositiveMean : public std::runtime_error {
public:
    NonPositiveMean() : std::runtime_error("fit requires positive mean rate") {}
};

/// Method-of-raw-moments fit: sigma^2 = max(0, ln(m2/m1^2)),
/// mu = ln(m1) - sigma^2/2.
LogNormalModel fit(const MomentCounter& counter);

/// Exceedance probability P(rate > level) under the model. A degenerate
/// model (sigma = 0) is a point mass at exp(mu).
double risk(const LogNormalModel& model, double level);

/// Risk-to-interval mapping parameters.
struct ScalingPolicy {
    double lb = 0.01;           // shortest interval (s)
    double hb = 30.0;           // longest interval (s)
    double zeta = 1.8;          // slope
    double capacity = 1e9;      // link capacity C (bits/s)
    double alarm_threshold = 0.01;
    double scale_fraction = 0.9;
    int samples_per_estimate = 30;
};

/// Inverse bounded-Pareto mapping from risk to sampling interval:
/// T(r) = lb / u^(1/zeta), u = r + (1 - r) * (lb/hb)^zeta.
/// T(0) = hb, T(1) = lb, strictly decreasing in between.
double next_interval(double risk, const ScalingPolicy& policy);

struct StepResult {
    bool estimated = false;        // an estimation boundary was crossed
    bool alarm = false;
    double alarm_risk = 0;         // risk at capacity
    double scale_risk = 0;         // risk at scale_fraction * capacity
    double mean_rate = 0;
    double interval_s = 0;         // next sampling interval
};

/// Self-scaling congestion detector for one monitored port. Feed one
/// rate sample per current interval; every `samples_per_estimate`
/// samples it refits the model, checks the alarm level, rescales the
/// interval, and resets the moment counters.
class RateDetector {
public:
    explicit RateDetector(const ScalingPolicy& policy);

    StepResult step(double rate_sample);

    double interval_s() const { return interval_s_; }
    const ScalingPolicy& policy() const { return policy_; }

private:
    ScalingPolicy policy_;
    MomentCounter counter_;
    double interval_s_;
};

} // namespace netobs::ratemon
