#pragma once

#include <cstdint>
#include <vector>

#include "netobs/delaymon/delaymon.hpp"
#include "netobs/ratemon/ratemon.hpp"
#include "netobs/sim/scenario.hpp"

namespace netobs::sim {

// Every suite here is a set of independent seeded runs. The parallel
// runners split runs across OpenMP threads; each run derives its own
// RNG stream, so serial and parallel execution produce bit-identical
// reports. The *_serial variants are the reference implementations the
// tests compare against.

// ---------------------------------------------------------------------------
// Delay precision suite (estimate_mean repetitions per Gamma shape)

struct PrecisionSuiteConfig {
    delaymon::PrecisionRequirement req{0.90, 0.10};
    std::uint64_t seed = 1;
    std::uint32_t repetitions = 2000;
    std::vector<double> shapes{1, 10, 50, 100};
    double scale = 0.01;  // per-shape scale; mean = shape * scale
    std::uint64_t init_n = 20;
};

struct PrecisionShapeReport {
    double shape = 0;
    double hit_rate = 0;
    double avg_samples = 0;
};

struct PrecisionSuiteReport {
    std::vector<PrecisionShapeReport> per_shape;
};

PrecisionSuiteReport run_precision_suite_serial(const PrecisionSuiteConfig& cfg);
PrecisionSuiteReport run_precision_suite(const PrecisionSuiteConfig& cfg);

// ---------------------------------------------------------------------------
// Change detection suite (Table-2 style scoring)

struct ChangeSuiteConfig {
    delaymon::ChangeRequirement req{0.95, 0.99, 1.05};
    std::uint64_t seed = 1;
    std::uint32_t runs = 16;
    std::uint32_t changes_per_run = 125;
    ScheduleParams schedule;       // shape fixed, means in [lo, hi]
    double batch_period_s = 50;
    double detect_window_s = 100;  // scaled if batch period differs from 50 s
};

struct ChangeSuiteReport {
    std::uint64_t total_changes = 0;
    std::uint64_t valid_changes = 0;
    std::uint64_t small_changes = 0;
    std::uint64_t invalid_changes = 0;
    std::uint64_t valid_detected = 0;
    std::uint64_t small_detected = 0;
    std::uint64_t false_alarms = 0;
    std::uint64_t estimations = 0;
    double total_samples = 0;

    double valid_detection_rate() const;
    double false_alarm_rate() const;
    double avg_samples_per_estimation() const;
};

ChangeSuiteReport run_change_suite_serial(const ChangeSuiteConfig& cfg);
ChangeSuiteReport run_change_suite(const ChangeSuiteConfig& cfg);

/// Eq-predicted per-batch sample count for the schedule's fixed shape.
std::uint64_t predicted_change_samples(const ChangeSuiteConfig& cfg);

// ---------------------------------------------------------------------------
// RateMon detection suite

struct RateSuiteConfig {
    RateScenario scenario;  // per-run seed derived from cfg.seed + index
    ratemon::ScalingPolicy policy;
    std::uint64_t seed = 1;
    std::uint32_t runs = 40;
};

struct RateSuiteReport {
    std::uint64_t episodes = 0;
    std::uint64_t detected = 0;
    std::uint64_t false_alarms = 0;
    std::uint64_t samples = 0;

    double detection_ratio() const {
        return episodes ? (double)detected / (double)episodes : 0.0;
    }
    double avg_samples_per_run(std::uint32_t runs) const {
        return runs ? (double)samples / (double)runs : 0.0;
    }
};

RateSuiteReport run_rate_suite_serial(const RateSuiteConfig& cfg);
RateSuiteReport run_rate_suite(const RateSuiteConfig& cfg);

/// Single-run detector trace against one generated trace; exposed for
/// the pipeline scenario and tests.
struct RateRunResult {
    std::vector<double> alarm_times;
    std::uint64_t samples = 0;
    std::uint64_t episodes = 0;
    std::uint64_t detected = 0;
    std::uint64_t false_alarms = 0;
};

RateRunResult run_rate_once(const RateScenario& sc,
                            const ratemon::ScalingPolicy& policy);

} // namespace netobs::sim
