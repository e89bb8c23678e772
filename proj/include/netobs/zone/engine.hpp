#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "netobs/measure/ast.hpp"

namespace netobs::zone {

/// Timestamped metric sample, millisecond resolution.
struct MetricPoint {
    std::string metric_var;
    double value = 0;
    std::int64_t timestamp_ms = 0;
    std::map<std::string, std::string> tags;
};

struct ReactionEvent {
    measure::TriggerKind trigger;
    std::string from_zone;
    std::string to_zone;
    std::string action;
    std::vector<measure::Arg> args;
    std::int64_t timestamp_ms = 0;
    bool known_action = true;  // Publish / Log
};

/// Local aggregation point: sliding windows per metric variable, zone
/// predicate evaluation, transition tracking.
///
/// Explicit-tick model: the caller invokes evaluate() at the cadence it
/// wants; identical (points, ticks) sequences give identical events.
class ZoneEngine {
public:
    explicit ZoneEngine(measure::MeasureSpec spec);

    /// Append a point to the windows of its variable. Points for
    /// undeclared variables are dropped (counted, not an error).
    void ingest(const MetricPoint& point);

    /// Re-evaluate all zones at `now` and emit events for the active-set
    /// delta per the spec's reactions.
    std::vector<ReactionEvent> evaluate(std::int64_t now_ms);

    const std::set<std::string>& active_zones() const { return active_; }
    std::uint64_t dropped_points() const { return dropped_; }

    /// Retained samples for one variable (newest-last), for inspection.
    const std::deque<std::pair<std::int64_t, double>>& window(
        const std::string& var) const;

    const measure::MeasureSpec& spec() const { return spec_; }

private:
    measure::MeasureSpec spec_;
    std::map<std::string, std::deque<std::pair<std::int64_t, double>>> windows_;
    std::map<std::string, double> horizon_s_;  // longest window per var
    std::map<std::string, std::int64_t> last_sample_ms_;
    std::set<std::string> active_;
    std::uint64_t dropped_ = 0;

    void prune(const std::string& var, std::int64_t newest_ms);
    bool eval_term(const measure::AggTerm& term, std::int64_t now_ms) const;
    bool eval_expr(const measure::BoolExpr& e, std::int64_t now_ms) const;
};

enum class OverloadClass { Normal, ScaleOut, Troubleshoot };

const char* to_string(OverloadClass c);

/// Three-case port-load classifier: below total threshold, balanced
/// overload (scale out), or imbalanced overload (troubleshoot). The
/// total threshold gates before the imbalance check.
OverloadClass classify_overload(const std::vector<double>& per_port_risk,
                                double total_threshold, double imbalance_ratio);

} // namespace netobs::zone
