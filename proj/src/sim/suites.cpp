#include "netobs/sim/suites.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace netobs::sim {

// ---------------------------------------------------------------------------
// Delay precision

namespace {

struct PrecisionCell {
    std::uint64_t hits = 0;
    std::uint64_t samples = 0;
};

PrecisionCell precision_one_rep(const PrecisionSuiteConfig& cfg, double shape,
                                std::uint64_t rep_seed) {
    stats::Rng rng(rep_seed);
    double true_mean = shape * cfg.scale;
    auto stream = [&]() -> std::optional<double> {
        return rng.gamma(shape, cfg.scale);
    };
    auto est = delaymon::estimate_mean(stream, cfg.req, cfg.init_n);
    PrecisionCell cell;
    cell.hits = (true_mean >= est.lo && true_mean <= est.hi) ? 1 : 0;
    cell.samples = est.samples_used;
    return cell;
}

PrecisionSuiteReport precision_reduce(const PrecisionSuiteConfig& cfg,
                                      const std::vector<PrecisionCell>& cells) {
    PrecisionSuiteReport report;
    for (std::size_t s = 0; s < cfg.shapes.size(); ++s) {
        PrecisionShapeReport r;
        r.shape = cfg.shapes[s];
        std::uint64_t hits = 0, samples = 0;
        for (std::uint32_t i = 0; i < cfg.repetitions; ++i) {
            const auto& c = cells[s * cfg.repetitions + i];
            hits += c.hits;
            samples += c.samples;
        }
        r.hit_rate = (double)hits / (double)cfg.repetitions;
        r.avg_samples = (double)samples / (double)cfg.repetitions;
        report.per_shape.push_back(r);
    }
    return report;
}

} // namespace

PrecisionSuiteReport run_precision_suite_serial(const PrecisionSuiteConfig& cfg) {
    std::vector<PrecisionCell> cells(cfg.shapes.size() * cfg.repetitions);
    for (std::size_t s = 0; s < cfg.shapes.size(); ++s)
        for (std::uint32_t i = 0; i < cfg.repetitions; ++i) {
            std::uint64_t idx = s * cfg.repetitions + i;
            cells[idx] = precision_one_rep(cfg, cfg.shapes[s],
                                           stats::Rng::derive_seed(cfg.seed, idx));
        }
    return precision_reduce(cfg, cells);
}

PrecisionSuiteReport run_precision_suite(const PrecisionSuiteConfig& cfg) {
    std::vector<PrecisionCell> cells(cfg.shapes.size() * cfg.repetitions);
    std::int64_t total = (std::int64_t)cells.size();
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t idx = 0; idx < total; ++idx) {
        std::size_t s = (std::size_t)idx / cfg.repetitions;
        cells[idx] = precision_one_rep(cfg, cfg.shapes[s],
                                       stats::Rng::derive_seed(cfg.seed, (std::uint64_t)idx));
    }
    return precision_reduce(cfg, cells);
}

// ---------------------------------------------------------------------------
// Change detection

double ChangeSuiteReport::valid_detection_rate() const {
    return valid_changes ? (double)valid_detected / (double)valid_changes : 0.0;
}
double ChangeSuiteReport::false_alarm_rate() const {
    return estimations ? (double)false_alarms / (double)estimations : 0.0;
}
double ChangeSuiteReport::avg_samples_per_estimation() const {
    return estimations ? total_samples / (double)estimations : 0.0;
}

std::uint64_t predicted_change_samples(const ChangeSuiteConfig& cfg) {
    // For Gamma(shape k, scale s): mean^2 / var = k, whatever the scale.
    delaymon::BatchStats stats;
    stats.n = 2;
    stats.mean = cfg.schedule.shape;
    stats.var = cfg.schedule.shape;  // alpha = mean^2/var = shape
    return delaymon::mean_change_samples(cfg.req, stats);
}

namespace {

ChangeSuiteReport change_one_run(const ChangeSuiteConfig& cfg, std::uint64_t run_seed) {
    stats::Rng rng(run_seed);

    ScheduleParams params = cfg.schedule;
    params.duration_s = 1e18;  // generate until enough changes
    std::vector<DelayPhase> schedule;
    {
        double t = 0;
        for (std::uint32_t i = 0; i <= cfg.changes_per_run; ++i) {
            DelayPhase ph;
            ph.start_s = t;
            ph.shape = params.shape;
            double mean = rng.uniform(params.mean_lo, params.mean_hi);
            ph.scale = mean / ph.shape;
            schedule.push_back(ph);
            t += rng.uniform(params.inter_lo_s, params.inter_hi_s);
        }
    }
    double duration = schedule.back().start_s + cfg.batch_period_s;

    // Sample times are monotone, so the active phase advances with a
    // single cursor instead of a per-draw schedule scan.
    std::size_t phase_idx = 0;
    auto draw_at = [&](double ts) {
        while (phase_idx + 1 < schedule.size() &&
               schedule[phase_idx + 1].start_s <= ts)
            ++phase_idx;
        return rng.gamma(schedule[phase_idx].shape, schedule[phase_idx].scale);
    };

    delaymon::ChangeDetector detector(cfg.req);
    double window = cfg.detect_window_s * (cfg.batch_period_s / 50.0);

    struct ChangeInfo {
        double time = 0;
        double magnitude = 0;   // |new_mean/old_mean - 1|
        bool monitored = false; // landed while the detector was Ready
        bool detected = false;
    };
    std::vector<ChangeInfo> changes;
    for (std::size_t i = 1; i < schedule.size(); ++i) {
        ChangeInfo ci;
        ci.time = schedule[i].start_s;
        ci.magnitude = std::fabs(schedule[i].mean() / schedule[i - 1].mean() - 1.0);
        changes.push_back(ci);
    }

    ChangeSuiteReport report;
    std::size_t next_change = 0;

    for (double t = 0; t + cfg.batch_period_s <= duration + 1e-9;
         t += cfg.batch_period_s) {
        // Changes landing inside this batch period are classified by the
        // detector phase at the moment they occur.
        while (next_change < changes.size() &&
               changes[next_change].time < t + cfg.batch_period_s) {
            changes[next_change].monitored = detector.ready();
            ++next_change;
        }

        // The detector decides the batch size; the batch spans the
        // period, so samples are placed at their position in it.
        std::uint64_t want = detector.required_n() ? detector.required_n() : 32;
        std::vector<double> batch(want);
        for (std::uint64_t j = 0; j < want; ++j) {
            double ts = t + ((double)j + 0.5) / (double)want * cfg.batch_period_s;
            batch[j] = draw_at(ts);
        }

        auto r = detector.detect(batch);
        if (!r.estimation_completed) continue;
        ++report.estimations;
        report.total_samples += (double)r.batch_n;

        bool change_verdict = r.verdict == delaymon::Verdict::MeanChange ||
                              r.verdict == delaymon::Verdict::VarianceChange;
        if (!change_verdict) continue;

        // Attribute the verdict to the most recent change within the
        // detection window; otherwise it is a false alarm.
        double verdict_time = t + cfg.batch_period_s;
        bool attributed = false;
        for (std::size_t i = next_change; i-- > 0;) {
            if (changes[i].time > verdict_time) continue;
            if (verdict_time - changes[i].time > window) break;
            changes[i].detected = true;
            attributed = true;
            break;
        }
        if (!attributed) ++report.false_alarms;
    }

    double small_threshold = std::fabs(cfg.req.c_M - 1.0);
    for (const auto& ci : changes) {
        ++report.total_changes;
        if (!ci.monitored) {
            ++report.invalid_changes;
            continue;
        }
        if (ci.magnitude >= small_threshold) {
            ++report.valid_changes;
            if (ci.detected) ++report.valid_detected;
        } else {
            ++report.small_changes;
            if (ci.detected) ++report.small_detected;
        }
    }
    return report;
}

void change_accumulate(ChangeSuiteReport& total, const ChangeSuiteReport& part) {
    total.total_changes += part.total_changes;
    total.valid_changes += part.valid_changes;
    total.small_changes += part.small_changes;
    total.invalid_changes += part.invalid_changes;
    total.valid_detected += part.valid_detected;
    total.small_detected += part.small_detected;
    total.false_alarms += part.false_alarms;
    total.estimations += part.estimations;
    total.total_samples += part.total_samples;
}

} // namespace

ChangeSuiteReport run_change_suite_serial(const ChangeSuiteConfig& cfg) {
    ChangeSuiteReport total;
    for (std::uint32_t r = 0; r < cfg.runs; ++r)
        change_accumulate(total, change_one_run(cfg, stats::Rng::derive_seed(cfg.seed, r)));
    return total;
}

ChangeSuiteReport run_change_suite(const ChangeSuiteConfig& cfg) {
    std::vector<ChangeSuiteReport> parts(cfg.runs);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t r = 0; r < (std::int64_t)cfg.runs; ++r)
        parts[r] = change_one_run(cfg, stats::Rng::derive_seed(cfg.seed, (std::uint64_t)r));
    ChangeSuiteReport total;
    for (const auto& p : parts) change_accumulate(total, p);
    return total;
}

// ---------------------------------------------------------------------------
// RateMon

RateRunResult run_rate_once(const RateScenario& sc,
                            const ratemon::ScalingPolicy& policy) {
    RateTrace trace = gen_rate_trace(sc);
    ratemon::RateDetector detector(policy);

    RateRunResult result;
    result.episodes = trace.truth.size();

    double t = 0;
    while (t < sc.duration_s) {
        double dt = detector.interval_s();
        double end = std::min(t + dt, sc.duration_s);
        double sample = trace.mean_rate(t, end);
        auto step = detector.step(sample);
        ++result.samples;
        if (step.estimated && step.alarm) result.alarm_times.push_back(end);
        t = end;
        if (end >= sc.duration_s) break;
    }

    // Score: an episode is detected by any alarm inside it or within one
    // hb after; alarms matching no episode are false alarms.
    std::vector<bool> hit(trace.truth.size(), false);
    for (double at : result.alarm_times) {
        bool matched = false;
        for (std::size_t i = 0; i < trace.truth.size(); ++i) {
            if (at >= trace.truth[i].first &&
                at <= trace.truth[i].second + policy.hb) {
                hit[i] = true;
                matched = true;
            }
        }
        if (!matched) ++result.false_alarms;
    }
    for (bool h : hit)
        if (h) ++result.detected;
    return result;
}

namespace {

RateSuiteReport rate_reduce(const std::vector<RateRunResult>& runs) {
    RateSuiteReport report;
    for (const auto& r : runs) {
        report.episodes += r.episodes;
        report.detected += r.detected;
        report.false_alarms += r.false_alarms;
        report.samples += r.samples;
    }
    return report;
}

} // namespace

RateSuiteReport run_rate_suite_serial(const RateSuiteConfig& cfg) {
    std::vector<RateRunResult> runs(cfg.runs);
    for (std::uint32_t r = 0; r < cfg.runs; ++r) {
        RateScenario sc = cfg.scenario;
        sc.seed = stats::Rng::derive_seed(cfg.seed, r);
        runs[r] = run_rate_once(sc, cfg.policy);
    }
    return rate_reduce(runs);
}

RateSuiteReport run_rate_suite(const RateSuiteConfig& cfg) {
    std::vector<RateRunResult> runs(cfg.runs);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t r = 0; r < (std::int64_t)cfg.runs; ++r) {
        RateScenario sc = cfg.scenario;
        sc.seed = stats::Rng::derive_seed(cfg.seed, (std::uint64_t)r);
        runs[r] = run_rate_once(sc, cfg.policy);
    }
    return rate_reduce(runs);
}

} // namespace netobs::sim
