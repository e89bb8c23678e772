#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netobs/stats/rng.hpp"

namespace netobs::sim {

/// One congestion episode: the traffic envelope ramps to
/// peak_fraction * capacity over buildup_s, holds, then decays.
struct Episode {
    double start_s = 0;
    double buildup_s = 10;  // T_p
    double peak_fraction = 1.1;
    double hold_s = 20;
    double decay_s = 10;
};

struct RateScenario {
    std::uint64_t seed = 1;
    double duration_s = 600;
    double base_mean_fraction = 0.2;  // baseline mean rate as a fraction of C
    double base_sigma = 0.25;         // log-space spread of the rate draws
    double capacity = 1e9;            // bits/s
    std::vector<Episode> episodes;
    double grid_s = 0.01;             // sample grid resolution
    double truth_threshold = 0.01;    // exceedance probability defining truth
};

/// Rate process sampled on a fixed grid so every detector configuration
/// sees the identical trace for a given seed.
struct RateTrace {
    double grid_s = 0;
    double duration_s = 0;
    std::vector<double> rate;                       // bits/s per cell
    std::vector<double> prefix;                     // prefix sums of rate
    std::vector<std::pair<double, double>> truth;   // congestion intervals

    double mean_rate(double t0, double t1) const;   // byte-counter view
};

RateTrace gen_rate_trace(const RateScenario& sc);

/// Piecewise Gamma(shape, scale) delay process.
struct DelayPhase {
    double start_s = 0;
    double shape = 4;
    double scale = 0.05;
    double mean() const { return shape * scale; }
};

struct DelayScenario {
    std::uint64_t seed = 1;
    double duration_s = 100000;
    std::vector<DelayPhase> schedule;  // ascending start_s, first at 0
    double batch_period_s = 50;
};

/// Random schedule with mean changes of uniform inter-arrival
/// (avg ~500 s) and means drawn in [mean_lo, mean_hi]; shape fixed.
struct ScheduleParams {
    double duration_s = 100000;
    double shape = 4;
    double mean_lo = 0.02;
    double mean_hi = 1.0;
    double inter_lo_s = 250;
    double inter_hi_s = 750;
};

std::vector<DelayPhase> make_random_schedule(stats::Rng& rng,
                                             const ScheduleParams& params);

/// The phase active at time t.
const DelayPhase& phase_at(const DelayScenario& sc, double t);

/// One delay draw from the phase active at time t.
double draw_delay(const DelayScenario& sc, stats::Rng& rng, double t);

} // namespace netobs::sim
