#include "netobs/sim/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>
#include <stdexcept>

#include <json.hpp>

#include "netobs/broker/broker.hpp"
#include "netobs/measure/parse.hpp"
#include "netobs/sim/suites.hpp"

namespace netobs::sim {

using nlohmann::json;

PipelineConfig make_pipeline_config(const std::string& mode,
                                    const std::string& measure_text) {
    PipelineConfig cfg;
    cfg.measure_text = measure_text;
    cfg.ports = 4;
    cfg.duration_s = 240;
    cfg.policy.lb = 0.01;
    cfg.policy.hb = 1.0;
    cfg.policy.zeta = 1.8;
    cfg.policy.capacity = 1e9;
    cfg.policy.alarm_threshold = 0.01;
    cfg.policy.scale_fraction = 0.9;
    cfg.total_threshold = 0.15;
    cfg.imbalance_ratio = 3.0;

    cfg.base_scenario.duration_s = cfg.duration_s;
    cfg.base_scenario.base_mean_fraction = 0.2;
    cfg.base_scenario.base_sigma = 0.25;
    cfg.base_scenario.capacity = cfg.policy.capacity;
    cfg.base_scenario.grid_s = 0.01;
    cfg.base_scenario.truth_threshold = 0.01;

    if (mode == "balanced") {
        cfg.port_peak_fraction = {1.15, 1.15, 1.15, 1.15};
    } else if (mode == "imbalanced") {
        cfg.port_peak_fraction = {1.4, 0, 0, 0};
    } else {
        throw std::invalid_argument("pipeline mode must be balanced or imbalanced");
    }
    return cfg;
}

bool PipelineReport::saw_transition(const std::string& from,
                                    const std::string& to) const {
    for (const auto& t : transitions)
        if (t.from == from && t.to == to) return true;
    return false;
}

namespace {

struct PortVarMap {
    std::vector<std::string> port_names;  // SAP ids by port index
    std::vector<std::string> risk_vars;   // MEASURE vars by port index
};

// The MEASURE program names abstract entities (SAPs); the deployment
// maps each overload_risk measurement onto one monitored port.
PortVarMap map_ports(const measure::MeasureSpec& spec, int ports) {
    PortVarMap map;
    for (const auto& m : spec.measurements) {
        if (m.metric != "overload_risk") continue;
        std::string port = m.args.empty() ? m.var : m.args[0].value.text;
        map.port_names.push_back(port);
        map.risk_vars.push_back(m.var);
    }
    if ((int)map.port_names.size() != ports)
        throw std::invalid_argument(
            "MEASURE program declares " + std::to_string(map.port_names.size()) +
            " overload_risk measurements, scenario has " + std::to_string(ports) +
            " ports");
    return map;
}

} // namespace

PipelineReport run_pipeline(const PipelineConfig& cfg, store::MetricStore* store_out) {
    auto parsed = measure::parse(cfg.measure_text);
    if (!parsed.ok())
        throw std::invalid_argument("MEASURE program has semantic errors: " +
                                    parsed.errors.front().message());
    const measure::MeasureSpec& spec = parsed.spec;
    PortVarMap ports = map_ports(spec, cfg.ports);

    broker::Broker root("orchestrator");
    broker::Broker un("un0");
    broker::InProcBrokerLink link(root, un);

    store::MetricStore local_store;
    store::MetricStore& store = store_out ? *store_out : local_store;

    // Observability points and the aggregation point live on the UN
    // broker; the control app and alarm log sit one level up.
    std::vector<std::unique_ptr<broker::InProcClient>> ramon;
    for (int p = 0; p < cfg.ports; ++p)
        ramon.push_back(std::make_unique<broker::InProcClient>(
            un, "ramon." + ports.port_names[p]));
    broker::InProcClient agg(un, "aggregator");
    broker::InProcClient tsdb(un, "tsdb");
    broker::InProcClient ctrl(root, "ctrlapp");
    broker::InProcClient alarmlog(root, "alarmlog");

    PipelineReport report;

    tsdb.on_frame = [&](const broker::Frame& f) {
        if (f.command != broker::Command::DeliverPub) return;
        try {
            store.put(store::MetricStore::decode_point(f.payload));
        } catch (const std::exception&) {
            // non-metric publication (zone event JSON); not persisted
        }
    };

    zone::ZoneEngine engine(spec);
    std::vector<std::deque<std::pair<double, double>>> risk_window(cfg.ports);

    agg.on_frame = [&](const broker::Frame& f) {
        if (f.command != broker::Command::DeliverPub) return;
        zone::MetricPoint point;
        try {
            point = store::MetricStore::decode_point(f.payload);
        } catch (const std::exception&) {
            return;
        }
        if (point.metric_var != "ratemon.risk") return;
        auto it = point.tags.find("port");
        if (it == point.tags.end()) return;
        for (int p = 0; p < cfg.ports; ++p) {
            if (ports.port_names[p] != it->second) continue;
            double t = (double)point.timestamp_ms / 1000.0;
            risk_window[p].emplace_back(t, point.value);
            zone::MetricPoint named = point;
            named.metric_var = ports.risk_vars[p];
            engine.ingest(named);
            break;
        }
    };

    tsdb.subscribe("metrics/*");
    tsdb.subscribe("alarm/*");
    agg.subscribe("metrics/*");
    ctrl.subscribe("scale/*");
    ctrl.subscribe("troubleshoot/*");
    alarmlog.subscribe("alarm/*");

    // Per-port traces and detectors.
    std::vector<RateTrace> traces;
    std::vector<ratemon::RateDetector> detectors;
    for (int p = 0; p < cfg.ports; ++p) {
        RateScenario sc = cfg.base_scenario;
        sc.seed = stats::Rng::derive_seed(cfg.seed, (std::uint64_t)p);
        double peak = cfg.port_peak_fraction.empty()
                          ? 0.0
                          : cfg.port_peak_fraction[(std::size_t)p];
        if (peak > sc.base_mean_fraction) {
            Episode ep;
            ep.start_s = 60;
            ep.buildup_s = 20;
            ep.peak_fraction = peak;
            ep.hold_s = 90;
            ep.decay_s = 20;
            sc.episodes.push_back(ep);
        }
        traces.push_back(gen_rate_trace(sc));
        detectors.emplace_back(cfg.policy);
    }

    auto publish_point = [&](int p, const std::string& metric, double value,
                             double t_s, const std::string& topic) {
        zone::MetricPoint point;
        point.metric_var = metric;
        point.value = value;
        point.timestamp_ms = (std::int64_t)std::llround(t_s * 1000.0);
        point.tags["port"] = ports.port_names[(std::size_t)p];
        ramon[(std::size_t)p]->publish(topic, store::MetricStore::encode_point(point));
    };

    zone::OverloadClass state = zone::OverloadClass::Normal;
    std::vector<double> next_sample(cfg.ports, 0.0);
    double next_tick = cfg.tick_s;

    auto do_sample = [&](int p) {
        double t = next_sample[(std::size_t)p];
        double dt = detectors[(std::size_t)p].interval_s();
        double end = std::min(t + dt, cfg.duration_s);
        double sample = traces[(std::size_t)p].mean_rate(t, end);
        auto step = detectors[(std::size_t)p].step(sample);
        if (step.estimated) {
            publish_point(p, "ratemon.rate", step.mean_rate, end, "metrics/ratemon");
            publish_point(p, "ratemon.risk", step.alarm_risk, end, "metrics/ratemon");
            publish_point(p, "ratemon.interval", step.interval_s, end,
                          "metrics/ratemon");
            if (step.alarm) {
                ++report.alarms;
                publish_point(p, "ratemon.alarm", step.alarm_risk, end,
                              "alarm/congestion");
            }
        }
        next_sample[(std::size_t)p] = end;
    };

    auto do_tick = [&](double t) {
        auto events = engine.evaluate((std::int64_t)std::llround(t * 1000.0));
        for (const auto& ev : events) {
            ++report.zone_events;
            if (ev.action != "Publish") continue;
            std::string topic = "alarm/zone";
            for (const auto& a : ev.args)
                if (a.key == "topic") topic = a.value.text;
            json j;
            j["action"] = ev.action;
            j["from"] = ev.from_zone;
            j["to"] = ev.to_zone;
            j["t_ms"] = ev.timestamp_ms;
            for (const auto& a : ev.args)
                if (a.key == "msg") j["msg"] = a.value.text;
            agg.publish(topic, j.dump());
        }

        // Three-case classification over the windowed per-port risk.
        std::vector<double> risks(cfg.ports);
        for (int p = 0; p < cfg.ports; ++p) {
            auto& win = risk_window[(std::size_t)p];
            while (!win.empty() && win.front().first < t - cfg.risk_window_s)
                win.pop_front();
            if (win.empty()) return;
            double sum = 0;
            for (const auto& [ts, v] : win) {
                (void)ts;
                sum += v;
            }
            risks[(std::size_t)p] = sum / (double)win.size();
        }
        auto cls = zone::classify_overload(risks, cfg.total_threshold,
                                           cfg.imbalance_ratio);
        if (cls != state) {
            report.transitions.push_back(
                {t, zone::to_string(state), zone::to_string(cls)});
            json j;
            j["class"] = zone::to_string(cls);
            j["t_s"] = t;
            j["risks"] = risks;
            if (cls == zone::OverloadClass::ScaleOut)
                agg.publish("scale/request", j.dump());
            else if (cls == zone::OverloadClass::Troubleshoot)
                agg.publish("troubleshoot/request", j.dump());
            state = cls;
        }
    };

    for (;;) {
        int port = -1;
        double t_min = next_tick;
        for (int p = 0; p < cfg.ports; ++p) {
            if (next_sample[(std::size_t)p] < t_min) {
                t_min = next_sample[(std::size_t)p];
                port = p;
            }
        }
        if (t_min >= cfg.duration_s) break;
        if (port >= 0)
            do_sample(port);
        else {
            do_tick(next_tick);
            next_tick += cfg.tick_s;
        }
    }

    // Tally what actually crossed the brokers.
    for (const auto& f : alarmlog.drain()) {
        if (f.command != broker::Command::DeliverPub) continue;
        if (f.destination == "alarm/congestion") ++report.alarm_publications;
        else ++report.zone_publications;
    }
    for (const auto& f : ctrl.drain()) {
        if (f.command != broker::Command::DeliverPub) continue;
        if (f.destination.rfind("scale/", 0) == 0) ++report.scale_requests;
        if (f.destination.rfind("troubleshoot/", 0) == 0)
            ++report.troubleshoot_requests;
    }
    auto alarm_rows = store.query_range("ratemon.alarm", {}, INT64_MIN, INT64_MAX,
                                        store::Agg::Raw);
    report.alarms_in_store = alarm_rows.point_count;
    report.metric_points_stored = store.total_points();
    for (const auto& z : engine.active_zones()) report.final_active_zones.push_back(z);
    return report;
}

} // namespace netobs::sim
