#include "netobs/sim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "netobs/stats/special.hpp"

namespace netobs::sim {

namespace {

// Envelope multiplier at time t: 1 outside episodes, ramping to the
// factor that puts the mean rate at peak_fraction * C inside them.
double envelope_at(const RateScenario& sc, double t) {
    double env = 1.0;
    for (const auto& ep : sc.episodes) {
        double peak_mult = ep.peak_fraction / sc.base_mean_fraction;
        double end = ep.start_s + ep.buildup_s + ep.hold_s + ep.decay_s;
        if (t < ep.start_s || t >= end) continue;
        double m;
        if (t < ep.start_s + ep.buildup_s) {
            double f = (t - ep.start_s) / ep.buildup_s;
            m = 1.0 + f * (peak_mult - 1.0);
        } else if (t < ep.start_s + ep.buildup_s + ep.hold_s) {
            m = peak_mult;
        } else {
            double f = (t - ep.start_s - ep.buildup_s - ep.hold_s) / ep.decay_s;
            m = peak_mult + f * (1.0 - peak_mult);
        }
        env = std::max(env, m);
    }
    return env;
}

} // namespace

RateTrace gen_rate_trace(const RateScenario& sc) {
    if (sc.grid_s <= 0 || sc.duration_s <= 0)
        throw std::invalid_argument("rate scenario needs positive grid and duration");
    for (const auto& ep : sc.episodes) {
        if (ep.buildup_s <= 0)
            throw std::invalid_argument("episode buildup time must be positive");
        if (ep.start_s + ep.buildup_s + ep.hold_s + ep.decay_s > sc.duration_s)
            throw std::invalid_argument("episode extends past scenario duration");
    }

    stats::Rng rng(sc.seed);
    std::size_t cells = (std::size_t)std::llround(sc.duration_s / sc.grid_s);
    RateTrace trace;
    trace.grid_s = sc.grid_s;
    trace.duration_s = sc.duration_s;
    trace.rate.resize(cells);
    trace.prefix.resize(cells + 1, 0.0);

    // Baseline log-normal with mean base_mean_fraction * C.
    double base_mean = sc.base_mean_fraction * sc.capacity;
    double mu0 = std::log(base_mean) - sc.base_sigma * sc.base_sigma / 2.0;

    bool in_truth = false;
    double truth_start = 0;
    for (std::size_t i = 0; i < cells; ++i) {
        double t = (double)i * sc.grid_s;
        double env = envelope_at(sc, t);
        trace.rate[i] = env * rng.lognormal(mu0, sc.base_sigma);
        trace.prefix[i + 1] = trace.prefix[i] + trace.rate[i];

        // Ground truth from the generator's own distribution, not from
        // any detector: P(env * X > C) with X ~ LogNormal(mu0, sigma).
        double z = (std::log(sc.capacity / env) - mu0) / sc.base_sigma;
        double exceed = 1.0 - stats::normal_cdf(z);
        bool congested = exceed > sc.truth_threshold;
        if (congested && !in_truth) {
            in_truth = true;
            truth_start = t;
        } else if (!congested && in_truth) {
            in_truth = false;
            trace.truth.emplace_back(truth_start, t);
        }
    }
    if (in_truth) trace.truth.emplace_back(truth_start, sc.duration_s);
    return trace;
}

double RateTrace::mean_rate(double t0, double t1) const {
    if (rate.empty()) return 0;
    auto clamp_cell = [&](double t) {
        auto c = (std::ptrdiff_t)std::floor(t / grid_s);
        return std::clamp<std::ptrdiff_t>(c, 0, (std::ptrdiff_t)rate.size());
    };
    std::ptrdiff_t a = clamp_cell(t0);
    std::ptrdiff_t b = clamp_cell(t1);
    if (b <= a) {
        std::size_t i = std::min((std::size_t)a, rate.size() - 1);
        return rate[i];
    }
    return (prefix[b] - prefix[a]) / (double)(b - a);
}

std::vector<DelayPhase> make_random_schedule(stats::Rng& rng,
                                             const ScheduleParams& params) {
    std::vector<DelayPhase> schedule;
    double t = 0;
    for (;;) {
        DelayPhase ph;
        ph.start_s = t;
        ph.shape = params.shape;
        double mean = rng.uniform(params.mean_lo, params.mean_hi);
        ph.scale = mean / ph.shape;
        schedule.push_back(ph);
        t += rng.uniform(params.inter_lo_s, params.inter_hi_s);
        if (t >= params.duration_s) break;
    }
    return schedule;
}

const DelayPhase& phase_at(const DelayScenario& sc, double t) {
    if (sc.schedule.empty())
        throw std::invalid_argument("delay scenario has no phases");
    const DelayPhase* current = &sc.schedule.front();
    for (const auto& ph : sc.schedule) {
        if (ph.start_s <= t) current = &ph;
        else break;
    }
    return *current;
}

double draw_delay(const DelayScenario& sc, stats::Rng& rng, double t) {
    const DelayPhase& ph = phase_at(sc, t);
    return rng.gamma(ph.shape, ph.scale);
}

} // namespace netobs::sim
