#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netobs/ratemon/ratemon.hpp"
#include "netobs/sim/scenario.hpp"
#include "netobs/store/store.hpp"
#include "netobs/zone/engine.hpp"

namespace netobs::sim {

/// Elastic-router style scenario: per-port rate detectors feed the
/// broker fabric; an aggregation point maintains zones from a MEASURE
/// program and classifies the port-risk profile; a control client on
/// the upper broker receives the scale / troubleshoot requests.
struct PipelineConfig {
    std::string measure_text;       // MEASURE program (risk zones/reactions)
    int ports = 4;
    std::uint64_t seed = 1;
    double duration_s = 240;
    double tick_s = 1.0;            // zone evaluation / classification tick
    ratemon::ScalingPolicy policy;
    double total_threshold = 0.2;
    double imbalance_ratio = 3.0;
    double risk_window_s = 10;      // classifier looks at recent mean risk
    // Overload shape: which ports ramp up, and how high.
    std::vector<double> port_peak_fraction;  // size = ports; <= base for none
    RateScenario base_scenario;     // episodes filled per port from peaks
};

/// Balanced / imbalanced presets used by the demo configs.
PipelineConfig make_pipeline_config(const std::string& mode,
                                    const std::string& measure_text);

struct TransitionRecord {
    double time_s = 0;
    std::string from;
    std::string to;
};

struct PipelineReport {
    std::vector<TransitionRecord> transitions;   // classifier state changes
    std::uint64_t alarms = 0;                    // detector congestion alarms
    std::uint64_t alarm_publications = 0;        // seen by the upper broker
    std::uint64_t alarms_in_store = 0;
    std::uint64_t scale_requests = 0;
    std::uint64_t troubleshoot_requests = 0;
    std::uint64_t zone_events = 0;               // MEASURE reactions fired
    std::uint64_t zone_publications = 0;         // observed on their topics
    std::uint64_t metric_points_stored = 0;
    std::vector<std::string> final_active_zones;

    bool saw_transition(const std::string& from, const std::string& to) const;
};

/// Runs the full pipeline in virtual time over an in-process 2-level
/// broker tree; every emitted metric point and alarm flows through the
/// brokers and lands in the metric store.
PipelineReport run_pipeline(const PipelineConfig& cfg, store::MetricStore* store_out);

} // namespace netobs::sim
