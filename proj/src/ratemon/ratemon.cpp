#include "netobs/ratemon/ratemon.hpp"

#include <algorithm>
#include <cmath>

#include "netobs/stats/special.hpp"

namespace netobs::ratemon {

void MomentCounter::update(double rate_sample) {
    if (!(rate_sample >= 0.0) || !std::isfinite(rate_sample))
        throw std::invalid_argument("rate sample must be finite and >= 0");
    s1_acc += rate_sample;
    s2_acc += rate_sample * rate_sample;
    ++n;
}

LogNormalModel fit(const MomentCounter& counter) {
    if (counter.n < 2) throw InsufficientSamples();
    if (!(counter.s1_acc > 0.0)) throw NonPositiveMean();
    double m1 = counter.s1_acc / (double)counter.n;
    double m2 = counter.s2_acc / (double)counter.n;
    // m2 < m1^2 only from rounding on near-constant streams; clamp.
    double sigma2 = std::max(0.0, std::log(m2 / (m1 * m1)));
    LogNormalModel model;
    model.sigma = std::sqrt(sigma2);
    model.mu = std::log(m1) - sigma2 / 2.0;
    model.n_used = counter.n;
    return model;
}

double risk(const LogNormalModel& model, double level) {
    if (!(level > 0.0)) throw std::invalid_argument("risk level must be > 0");
    if (model.sigma == 0.0) {
        double point = std::exp(model.mu);
        if (point < level) return 0.0;
        if (point > level) return 1.0;
        return 0.5;
    }
    double z = (std::log(level) - model.mu) / model.sigma;
    return 1.0 - stats::normal_cdf(z);
}

double next_interval(double r, const ScalingPolicy& policy) {
    double k = std::pow(policy.lb / policy.hb, policy.zeta);
    double u = r + (1.0 - r) * k;
    return policy.lb / std::pow(u, 1.0 / policy.zeta);
}

RateDetector::RateDetector(const ScalingPolicy& policy)
    : policy_(policy), interval_s_(policy.hb) {}

StepResult RateDetector::step(double rate_sample) {
    counter_.update(rate_sample);
    StepResult result;
    result.interval_s = interval_s_;
    if ((int)counter_.n < policy_.samples_per_estimate) return result;

    LogNormalModel model = fit(counter_);
    result.estimated = true;
    result.mean_rate = counter_.s1_acc / (double)counter_.n;
    result.alarm_risk = risk(model, policy_.capacity);
    result.scale_risk = risk(model, policy_.scale_fraction * policy_.capacity);
    result.alarm = result.alarm_risk > policy_.alarm_threshold;
    interval_s_ = next_interval(result.scale_risk, policy_);
    result.interval_s = interval_s_;
    counter_.reset();  // one fresh estimate per period
    return result;
}

} // namespace netobs::ratemon
