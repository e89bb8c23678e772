#include "netobs/delaymon/delaymon.hpp"

#include <algorithm>
#include <cmath>

#include "netobs/stats/special.hpp"

namespace netobs::delaymon {

BatchStats BatchStats::from(std::span<const double> samples) {
    BatchStats s;
    s.n = samples.size();
    if (s.n == 0) return s;
    double sum = 0;
    for (double x : samples) sum += x;
    s.mean = sum / (double)s.n;
    if (s.n >= 2) {
        double acc = 0;
        for (double x : samples) {
            double d = x - s.mean;
            acc += d * d;
        }
        s.var = acc / (double)(s.n - 1);
    }
    return s;
}

double BatchStats::stddev() const { return std::sqrt(var); }

std::uint64_t required_samples(const PrecisionRequirement& req,
                               const BatchStats& init,
                               const PrecisionOptions& opts) {
    if (init.n < 2 || !(init.mean > 0.0)) throw DegenerateInit();
    if (!(req.p > 0.0 && req.p < 1.0) || !(req.c > 0.0))
        throw std::invalid_argument("precision requirement out of range");

    double s = init.stddev();
    double inner = 2.0 * s / (init.mean * req.c) * stats::erf_inv(req.p);
    double raw = std::log(2.0 - 2.0 * req.p);
    if (opts.log10_delta) raw /= std::log(10.0);
    long long delta = -(long long)std::llround(raw);
    long long h = (long long)std::ceil(2.0 * inner * inner) + delta;
    return (std::uint64_t)std::max(1LL, h);
}

PrecisionEstimate estimate_mean(const std::function<std::optional<double>()>& stream,
                                const PrecisionRequirement& req,
                                std::uint64_t init_n,
                                const PrecisionOptions& opts) {
    std::vector<double> init;
    init.reserve(init_n);
    for (std::uint64_t i = 0; i < init_n; ++i) {
        auto x = stream();
        if (!x) throw StreamExhausted();
        init.push_back(*x);
    }
    std::uint64_t h = required_samples(req, BatchStats::from(init), opts);

    double sum = 0;
    for (std::uint64_t i = 0; i < h; ++i) {
        auto x = stream();
        if (!x) throw StreamExhausted();
        sum += *x;
    }
    PrecisionEstimate est;
    est.mean = sum / (double)h;
    est.lo = est.mean * (1.0 - req.c / 2.0);
    est.hi = est.mean * (1.0 + req.c / 2.0);
    est.samples_used = init_n + h;
    return est;
}

Interval mean_change_interval(const BatchStats& ref, double p_M,
                              std::uint64_t next_n) {
    if (ref.n < 2) throw InsufficientSamples();
    if (next_n == 0) next_n = ref.n;
    double t = stats::t_quantile((1.0 + p_M) / 2.0, (double)(ref.n - 1));
    double s = ref.stddev();
    double half = t * s * (1.0 / std::sqrt((double)ref.n) +
                           1.0 / std::sqrt((double)next_n));
    return {ref.mean - half, ref.mean + half};
}

std::uint64_t mean_change_samples(const ChangeRequirement& req,
                                  const BatchStats& ref, bool* degenerate) {
    if (!(ref.mean > 0.0)) throw DegenerateInit();
    if (degenerate) *degenerate = false;
    if (!(ref.var > 0.0)) {
        if (degenerate) *degenerate = true;
        return 1;
    }
    double alpha = ref.mean * ref.mean / ref.var;
    double zp = stats::normal_quantile((1.0 + req.p_M) / 2.0);
    double zq = stats::normal_quantile(req.q_M);
    double num = 2.0 * std::pow(req.c_M * zq + zp, 2.0);
    double den = alpha * std::pow(req.c_M - 1.0, 2.0);
    double n = std::ceil(num / den);
    return (std::uint64_t)std::max(1.0, n);
}

Interval variance_change_interval(const BatchStats& ref, double p_M) {
    if (ref.n < 2) throw InsufficientSamples();
    double nu = (double)(ref.n - 1);
    double lo_q = stats::chi2_quantile((1.0 - p_M) / 2.0, nu) / nu;
    double hi_q = stats::chi2_quantile((1.0 + p_M) / 2.0, nu) / nu;
    // Both the reference and the compared variance fluctuate; the ratio
    // bound keeps the false-alarm probability under 1 - p_M.
    return {ref.var * lo_q / hi_q, ref.var * hi_q / lo_q};
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Training: return "Training";
        case Verdict::NoChange: return "NoChange";
        case Verdict::MeanChange: return "MeanChange";
        case Verdict::VarianceChange: return "VarianceChange";
    }
    return "?";
}

ChangeDetector::ChangeDetector(const ChangeRequirement& req,
                               std::uint64_t init_n, bool check_variance)
    : req_(req), init_n_(std::max<std::uint64_t>(2, init_n)),
      check_variance_(check_variance) {}

void ChangeDetector::adopt_reference(const BatchStats& stats) {
    reference_ = stats;
    required_n_ = mean_change_samples(req_, reference_);
    required_n_ = std::max(required_n_, (std::uint64_t)2);
    mean_interval_ = mean_change_interval(reference_, req_.p_M, required_n_);
    if (check_variance_)
        var_interval_ = variance_change_interval(reference_, req_.p_M);
    phase_ = Phase::Ready;
}

void ChangeDetector::retrain() {
    phase_ = Phase::Training;
    buffer_.clear();
    required_n_ = 0;
}

DetectResult ChangeDetector::detect(std::span<const double> batch) {
    if (batch.empty())
        throw std::invalid_argument("detect: empty batch");
    buffer_.insert(buffer_.end(), batch.begin(), batch.end());

    if (phase_ == Phase::Training) {
        if (required_n_ == 0 && buffer_.size() >= init_n_) {
            BatchStats provisional = BatchStats::from(buffer_);
            required_n_ = std::max<std::uint64_t>(
                2, mean_change_samples(req_, provisional));
        }
        if (required_n_ == 0 || buffer_.size() < required_n_)
            return {Verdict::Training, false, 0};
        // Freeze the most recent required_n samples as the reference.
        std::span<const double> tail(buffer_.data() + buffer_.size() - required_n_,
                                     required_n_);
        adopt_reference(BatchStats::from(tail));
        buffer_.clear();
        return {Verdict::Training, false, 0};
    }

    if (buffer_.size() < required_n_) return {Verdict::NoChange, false, 0};

    std::span<const double> head(buffer_.data(), required_n_);
    BatchStats current = BatchStats::from(head);
    std::uint64_t used = required_n_;

    DetectResult result;
    result.estimation_completed = true;
    result.batch_n = used;
    if (!mean_interval_.contains(current.mean)) {
        result.verdict = Verdict::MeanChange;
        retrain();
        return result;
    }
    if (check_variance_ && !var_interval_.contains(current.var)) {
        result.verdict = Verdict::VarianceChange;
        retrain();
        return result;
    }
    result.verdict = Verdict::NoChange;
    // Slide the reference forward so drift tracks the stable process.
    buffer_.erase(buffer_.begin(), buffer_.begin() + (std::ptrdiff_t)used);
    adopt_reference(current);
    return result;
}

} // namespace netobs::delaymon
