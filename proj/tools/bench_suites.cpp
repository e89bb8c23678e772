// Compares the serial reference suite runners against the OpenMP ones:
// identical reports, wall time side by side.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "netobs/sim/suites.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

template <typename F>
double timed(F&& f) {
    auto t0 = clock_type::now();
    f();
    return seconds_since(t0);
}

int threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace

int main(int argc, char** argv) {
    bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
    std::printf("suite benchmark, %d thread(s)\n", threads());

    {
        netobs::sim::PrecisionSuiteConfig cfg;
        cfg.repetitions = quick ? 100 : 2000;
        cfg.shapes = {1, 10, 50, 100};
        netobs::sim::PrecisionSuiteReport serial_report, parallel_report;
        double ts = timed([&] { serial_report = run_precision_suite_serial(cfg); });
        double tp = timed([&] { parallel_report = run_precision_suite(cfg); });
        bool same = serial_report.per_shape.size() == parallel_report.per_shape.size();
        for (std::size_t i = 0; same && i < serial_report.per_shape.size(); ++i)
            same = serial_report.per_shape[i].hit_rate ==
                       parallel_report.per_shape[i].hit_rate &&
                   serial_report.per_shape[i].avg_samples ==
                       parallel_report.per_shape[i].avg_samples;
        std::printf("precision    serial %7.3fs  parallel %7.3fs  speedup %5.2fx  identical=%s\n",
                    ts, tp, ts / tp, same ? "yes" : "NO");
        if (!same) return 1;
    }

    {
        netobs::sim::ChangeSuiteConfig cfg;
        cfg.runs = quick ? 2 : 8;
        cfg.changes_per_run = quick ? 10 : 60;
        netobs::sim::ChangeSuiteReport serial_report, parallel_report;
        double ts = timed([&] { serial_report = run_change_suite_serial(cfg); });
        double tp = timed([&] { parallel_report = run_change_suite(cfg); });
        bool same = serial_report.total_changes == parallel_report.total_changes &&
                    serial_report.valid_detected == parallel_report.valid_detected &&
                    serial_report.false_alarms == parallel_report.false_alarms &&
                    serial_report.total_samples == parallel_report.total_samples;
        std::printf("change       serial %7.3fs  parallel %7.3fs  speedup %5.2fx  identical=%s\n",
                    ts, tp, ts / tp, same ? "yes" : "NO");
        if (!same) return 1;
    }

    {
        netobs::sim::RateSuiteConfig cfg;
        cfg.runs = quick ? 4 : 40;
        cfg.scenario.duration_s = 300;
        netobs::sim::Episode ep;
        ep.start_s = 100;
        ep.buildup_s = 10;
        ep.peak_fraction = 1.2;
        ep.hold_s = 30;
        ep.decay_s = 10;
        cfg.scenario.episodes.push_back(ep);
        cfg.policy.hb = 30;
        netobs::sim::RateSuiteReport serial_report, parallel_report;
        double ts = timed([&] { serial_report = run_rate_suite_serial(cfg); });
        double tp = timed([&] { parallel_report = run_rate_suite(cfg); });
        bool same = serial_report.episodes == parallel_report.episodes &&
                    serial_report.detected == parallel_report.detected &&
                    serial_report.samples == parallel_report.samples;
        std::printf("ratemon      serial %7.3fs  parallel %7.3fs  speedup %5.2fx  identical=%s\n",
                    ts, tp, ts / tp, same ? "yes" : "NO");
        if (!same) return 1;
    }

    return 0;
}
