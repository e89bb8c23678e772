#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "netobs/broker/broker.hpp"
#include "netobs/broker/tcp.hpp"
#include "netobs/measure/bind.hpp"
#include "netobs/measure/parse.hpp"
#include "netobs/nffg/nffg.hpp"
#include "netobs/query/query.hpp"
#include "netobs/sim/pipeline.hpp"
#include "netobs/sim/suites.hpp"
#include "netobs/store/store.hpp"

using nlohmann::json;

namespace {

// Exit codes: 0 ok, 1 domain failure (bad program, failed property),
// 2 usage or config error.
constexpr int kOk = 0;
constexpr int kDomainFailure = 1;
constexpr int kUsage = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json value_to_json(const netobs::measure::Value& v) {
    using netobs::measure::Value;
    json j;
    switch (v.kind) {
        case Value::Kind::Ident: j["kind"] = "ident"; j["text"] = v.text; break;
        case Value::Kind::Number: j["kind"] = "number"; j["value"] = v.number; break;
        case Value::Kind::String: j["kind"] = "string"; j["text"] = v.text; break;
        case Value::Kind::Duration:
            j["kind"] = "duration";
            j["seconds"] = v.number;
            break;
        case Value::Kind::Struct: j["kind"] = "struct"; j["text"] = v.text; break;
    }
    return j;
}

json args_to_json(const std::vector<netobs::measure::Arg>& args) {
    json out = json::array();
    for (const auto& a : args) {
        json j;
        if (!a.key.empty()) j["key"] = a.key;
        j["value"] = value_to_json(a.value);
        out.push_back(j);
    }
    return out;
}

json expr_to_json(const netobs::measure::BoolExpr& e) {
    using netobs::measure::BoolExpr;
    json j;
    switch (e.kind) {
        case BoolExpr::Kind::Term: {
            const auto& t = e.term;
            json term;
            term["var"] = t.var;
            if (t.is_age) {
                term["accessor"] = "age";
            } else {
                term["func"] = netobs::measure::to_string(t.func);
                if (t.window_s) term["window_s"] = *t.window_s;
            }
            term["cmp"] = netobs::measure::to_string(t.cmp);
            term["threshold"] = t.threshold;
            j["term"] = term;
            return j;
        }
        case BoolExpr::Kind::And: j["op"] = "and"; break;
        case BoolExpr::Kind::Or: j["op"] = "or"; break;
        case BoolExpr::Kind::Not: j["op"] = "not"; break;
    }
    j["children"] = json::array();
    for (const auto& c : e.children) j["children"].push_back(expr_to_json(*c));
    return j;
}

json spec_to_json(const netobs::measure::MeasureSpec& spec) {
    json j;
    j["measurements"] = json::array();
    for (const auto& m : spec.measurements) {
        json mj;
        mj["var"] = m.var;
        mj["metric"] = m.metric;
        mj["args"] = args_to_json(m.args);
        j["measurements"].push_back(mj);
    }
    j["zones"] = json::array();
    for (const auto& z : spec.zones) {
        json zj;
        zj["name"] = z.name;
        zj["predicate"] = expr_to_json(*z.predicate);
        j["zones"].push_back(zj);
    }
    j["reactions"] = json::array();
    for (const auto& r : spec.reactions) {
        json rj;
        switch (r.trigger) {
            case netobs::measure::TriggerKind::Transition: rj["trigger"] = "transition"; break;
            case netobs::measure::TriggerKind::Enter: rj["trigger"] = "enter"; break;
            case netobs::measure::TriggerKind::Leave: rj["trigger"] = "leave"; break;
            case netobs::measure::TriggerKind::While: rj["trigger"] = "while"; break;
        }
        if (!r.from_zone.empty()) rj["from"] = r.from_zone;
        if (!r.to_zone.empty()) rj["to"] = r.to_zone;
        rj["action"] = r.action;
        rj["args"] = args_to_json(r.args);
        j["reactions"].push_back(rj);
    }
    return j;
}

int cmd_measure(const std::string& mode, const std::string& file,
                const std::string& nffg_file, bool json_out) {
    std::string text;
    try {
        text = read_file(file);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kUsage;
    }
    netobs::measure::ParseResult result;
    try {
        result = netobs::measure::parse(text);
    } catch (const netobs::measure::SyntaxError& e) {
        std::cerr << netobs::measure::format_diagnostic(file, e.pos(), e.what())
                  << "\n";
        if (json_out) std::cout << json{{"error", e.what()}}.dump() << "\n";
        return kDomainFailure;
    }

    json out;
    out["ast"] = spec_to_json(result.spec);
    out["errors"] = json::array();
    for (const auto& err : result.errors) {
        out["errors"].push_back(err.message());
        std::cerr << netobs::measure::format_diagnostic(file, err.pos, err.message())
                  << "\n";
    }

    if (mode == "check" && !nffg_file.empty()) {
        try {
            auto g = netobs::nffg::load_file(nffg_file);
            auto report = netobs::measure::bind(result.spec, g.entity_ids());
            out["binding"] = {{"resolved", report.resolved},
                              {"unresolved", report.unresolved}};
            if (!json_out)
                std::cerr << report.unresolved.size() << " unresolved\n";
        } catch (const std::exception& e) {
            std::cerr << e.what() << "\n";
            return kUsage;
        }
    }

    if (json_out)
        std::cout << out.dump(2) << "\n";
    else if (mode == "parse")
        std::cout << out["ast"].dump(2) << "\n";
    else if (out.contains("binding"))
        std::cout << out["binding"].dump(2) << "\n";
    else
        std::cout << out["errors"].dump(2) << "\n";
    return result.errors.empty() ? kOk : kDomainFailure;
}

int cmd_graph_check(const std::string& nffg_file, const std::string& property,
                    const std::string& src, const std::string& dst,
                    const std::string& mb, bool json_out) {
    netobs::nffg::NfFg g;
    try {
        g = netobs::nffg::load_file(nffg_file);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kUsage;
    }

    netobs::nffg::Property prop;
    if (property == "reach") prop.kind = netobs::nffg::PropertyKind::Reachability;
    else if (property == "isolate") prop.kind = netobs::nffg::PropertyKind::Isolation;
    else if (property == "traverse") prop.kind = netobs::nffg::PropertyKind::NodeTraversal;
    else {
        std::cerr << "unknown property '" << property << "'\n";
        return kUsage;
    }
    prop.src = src;
    prop.dst = dst;
    prop.middlebox = mb;
    if (prop.kind != netobs::nffg::PropertyKind::Reachability && mb.empty()) {
        std::cerr << "--mb is required for this property\n";
        return kUsage;
    }

    netobs::nffg::CheckResult result;
    try {
        result = netobs::nffg::check(g, prop);
    } catch (const netobs::nffg::UnknownNode& e) {
        std::cerr << e.what() << "\n";
        return kUsage;
    }

    json out;
    out["property"] = property;
    out["holds"] = result.holds;
    out["vacuous"] = result.vacuous;
    if (result.witness) out["witness"] = *result.witness;
    if (json_out) {
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << property << (result.holds ? " holds" : " violated");
        if (result.witness) {
            std::cout << "; witness:";
            for (const auto& n : *result.witness) std::cout << " " << n;
        }
        std::cout << "\n";
    }
    return result.holds ? kOk : kDomainFailure;
}

json trace_to_json(const netobs::query::TraceNode& t) {
    json j;
    j["label"] = t.label;
    if (t.value) j["value"] = *t.value;
    if (!t.children.empty()) {
        j["children"] = json::array();
        for (const auto& c : t.children) j["children"].push_back(trace_to_json(c));
    }
    return j;
}

int cmd_query_run(const std::string& nffg_file, const std::string& store_file,
                  const std::string& metric, const std::string& target,
                  const std::string& src, const std::string& dst,
                  const std::string& rules_file, const std::string& combiner,
                  bool json_out) {
    try {
        auto g = netobs::nffg::load_file(nffg_file);
        auto store = netobs::store::MetricStore::load(store_file);
        netobs::query::QueryEngine engine;
        if (!rules_file.empty()) {
            netobs::query::Library lib;
            lib.metric = metric;
            lib.kind = netobs::query::Library::Kind::NodeAggregate;
            lib.rules_text = read_file(rules_file);
            lib.primitive = metric;
            engine.register_library(lib);
        }
        if (!combiner.empty()) {
            netobs::query::Library lib;
            lib.metric = "e2e_delay";
            lib.kind = netobs::query::Library::Kind::PathSum;
            lib.primitive = "delay";
            lib.unit = "ms";
            if (combiner == "min") lib.path_combiner = netobs::query::PathCombiner::Min;
            else if (combiner == "mean") lib.path_combiner = netobs::query::PathCombiner::Mean;
            else lib.path_combiner = netobs::query::PathCombiner::Max;
            engine.register_library(lib);
        }

        netobs::query::QueryRequest req;
        req.metric = metric;
        req.target = target;
        req.src = src;
        req.dst = dst;
        auto result = engine.query(req, g, store);

        json out;
        out["value"] = result.value;
        out["unit"] = result.unit;
        out["leaves"] = json::array();
        for (const auto& [id, v] : result.leaves)
            out["leaves"].push_back({{"id", id}, {"value", v}});
        out["missing"] = result.missing;
        out["trace"] = trace_to_json(result.trace);
        std::cout << out.dump(2) << "\n";
        (void)json_out;
        return kOk;
    } catch (const netobs::query::UnknownMetric& e) {
        std::cerr << e.what() << "\n";
        return kDomainFailure;
    } catch (const netobs::query::UnknownTarget& e) {
        std::cerr << e.what() << "\n";
        return kDomainFailure;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kUsage;
    }
}

std::pair<std::string, std::uint16_t> parse_hostport(const std::string& s) {
    auto colon = s.rfind(':');
    if (colon == std::string::npos)
        return {"127.0.0.1", (std::uint16_t)std::stoi(s)};
    std::string host = s.substr(0, colon);
    if (host.empty()) host = "127.0.0.1";
    return {host, (std::uint16_t)std::stoi(s.substr(colon + 1))};
}

int cmd_broker_run(const std::string& listen, const std::string& parent,
                   const std::string& name) {
    try {
        auto [host, port] = parse_hostport(listen);
        (void)host;  // brokers bind loopback
        netobs::broker::Broker core(name.empty() ? "broker" : name);
        netobs::broker::TcpBroker tcp(core, port);
        if (!parent.empty()) {
            auto [phost, pport] = parse_hostport(parent);
            tcp.connect_parent(phost, pport);
        }
        std::cout << json{{"listening", tcp.port()}, {"name", core.id()}}.dump()
                  << std::endl;
        for (;;) std::this_thread::sleep_for(std::chrono::seconds(3600));
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kUsage;
    }
    return kOk;
}

json rate_report_json(const netobs::sim::RateSuiteReport& r, std::uint32_t runs) {
    return json{{"episodes", r.episodes},
                {"detected", r.detected},
                {"false_alarms", r.false_alarms},
                {"detection_ratio", r.detection_ratio()},
                {"samples", r.samples},
                {"avg_samples_per_run", r.avg_samples_per_run(runs)}};
}

int cmd_sim_run(const std::string& config_file, std::uint64_t seed_override,
                const std::string& out_file) {
    json cfg;
    try {
        cfg = json::parse(read_file(config_file));
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kUsage;
    }

    json report;
    try {
        std::string kind = cfg.at("kind").get<std::string>();
        std::uint64_t seed = cfg.value("seed", (std::uint64_t)1);
        if (seed_override) seed = seed_override;

        if (kind == "precision") {
            netobs::sim::PrecisionSuiteConfig pc;
            pc.seed = seed;
            pc.req.p = cfg.value("p", 0.90);
            pc.req.c = cfg.value("c", 0.10);
            pc.repetitions = cfg.value("repetitions", 2000u);
            if (cfg.contains("shapes"))
                pc.shapes = cfg["shapes"].get<std::vector<double>>();
            pc.scale = cfg.value("scale", 0.01);
            auto r = netobs::sim::run_precision_suite(pc);
            report["kind"] = kind;
            report["per_shape"] = json::array();
            for (const auto& s : r.per_shape)
                report["per_shape"].push_back({{"shape", s.shape},
                                               {"hit_rate", s.hit_rate},
                                               {"avg_samples", s.avg_samples}});
        } else if (kind == "change_detection") {
            netobs::sim::ChangeSuiteConfig cc;
            cc.seed = seed;
            cc.req.p_M = cfg.value("p_M", 0.95);
            cc.req.q_M = cfg.value("q_M", 0.99);
            cc.req.c_M = 1.0 + cfg.value("c", 0.05);
            cc.runs = cfg.value("runs", 16u);
            cc.changes_per_run = cfg.value("changes_per_run", 125u);
            cc.schedule.shape = cfg.value("shape", 4.0);
            cc.batch_period_s = cfg.value("batch_period_s", 50.0);
            auto r = netobs::sim::run_change_suite(cc);
            report["kind"] = kind;
            report["total_changes"] = r.total_changes;
            report["valid_changes"] = r.valid_changes;
            report["small_changes"] = r.small_changes;
            report["invalid_changes"] = r.invalid_changes;
            report["valid_detection_rate"] = r.valid_detection_rate();
            report["small_detection_rate"] =
                r.small_changes ? (double)r.small_detected / (double)r.small_changes
                                : 0.0;
            report["false_alarm_rate"] = r.false_alarm_rate();
            report["avg_samples_per_estimation"] = r.avg_samples_per_estimation();
            report["predicted_samples_per_estimation"] =
                netobs::sim::predicted_change_samples(cc);
        } else if (kind == "rate_suite" || kind == "rate_sweep") {
            netobs::sim::RateSuiteConfig rc;
            rc.seed = seed;
            rc.runs = cfg.value("runs", 40u);
            rc.scenario.duration_s = cfg.value("duration_s", 600.0);
            rc.scenario.capacity = cfg.value("capacity", 1e9);
            rc.scenario.base_mean_fraction = cfg.value("base_mean_fraction", 0.2);
            rc.scenario.base_sigma = cfg.value("base_sigma", 0.25);
            rc.scenario.grid_s = cfg.value("grid_s", 0.01);
            double tp = cfg.value("buildup_s", 10.0);
            int episodes = cfg.value("episodes", 3);
            double spacing = rc.scenario.duration_s / (double)(episodes + 1);
            for (int e = 0; e < episodes; ++e) {
                netobs::sim::Episode ep;
                ep.start_s = spacing * (double)(e + 1);
                ep.buildup_s = tp;
                ep.peak_fraction = cfg.value("peak_fraction", 1.2);
                ep.hold_s = cfg.value("hold_s", 30.0);
                ep.decay_s = cfg.value("decay_s", 10.0);
                rc.scenario.episodes.push_back(ep);
            }
            rc.policy.lb = cfg.value("lb", 0.01);
            rc.policy.hb = cfg.value("hb", 30.0);
            rc.policy.capacity = rc.scenario.capacity;
            rc.policy.alarm_threshold = cfg.value("alarm_threshold", 0.01);
            rc.policy.scale_fraction = cfg.value("scale_fraction", 0.9);

            report["kind"] = kind;
            if (kind == "rate_suite") {
                rc.policy.zeta = cfg.value("zeta", 1.8);
                report["result"] = rate_report_json(netobs::sim::run_rate_suite(rc), rc.runs);
            } else {
                std::vector<double> zetas =
                    cfg.value("zetas", std::vector<double>{1.2, 1.8, 2.4, 3.0});
                report["sweep"] = json::array();
                for (double z : zetas) {
                    rc.policy.zeta = z;
                    auto r = netobs::sim::run_rate_suite(rc);
                    json row = rate_report_json(r, rc.runs);
                    row["zeta"] = z;
                    report["sweep"].push_back(row);
                }
            }
        } else if (kind == "pipeline") {
            std::string measure_text = cfg.contains("measure_file")
                                           ? read_file(cfg["measure_file"].get<std::string>())
                                           : cfg.at("measure_text").get<std::string>();
            auto pc = netobs::sim::make_pipeline_config(
                cfg.value("mode", std::string("balanced")), measure_text);
            pc.seed = seed;
            netobs::store::MetricStore store;
            auto r = netobs::sim::run_pipeline(pc, &store);
            if (cfg.contains("store_out"))
                store.snapshot(cfg["store_out"].get<std::string>());
            report["kind"] = kind;
            report["mode"] = cfg.value("mode", std::string("balanced"));
            report["transitions"] = json::array();
            for (const auto& t : r.transitions)
                report["transitions"].push_back(
                    {{"t_s", t.time_s}, {"from", t.from}, {"to", t.to}});
            report["alarms"] = r.alarms;
            report["alarm_publications"] = r.alarm_publications;
            report["alarms_in_store"] = r.alarms_in_store;
            report["scale_requests"] = r.scale_requests;
            report["troubleshoot_requests"] = r.troubleshoot_requests;
            report["zone_events"] = r.zone_events;
            report["zone_publications"] = r.zone_publications;
            report["metric_points_stored"] = r.metric_points_stored;
        } else {
            std::cerr << "unknown scenario kind '" << kind << "'\n";
            return kUsage;
        }
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kUsage;
    }

    std::string dump = report.dump(2);
    if (!out_file.empty()) {
        std::ofstream out(out_file, std::ios::trunc);
        out << dump << "\n";
    }
    std::cout << dump << "\n";
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"network observability toolkit"};
    app.require_subcommand(1);
    bool json_out = false;
    app.add_flag("--json", json_out, "machine-readable stdout");

    // measure parse|check
    auto* measure = app.add_subcommand("measure", "MEASURE language tools");
    measure->require_subcommand(1);
    std::string measure_file, nffg_for_bind;
    auto* mparse = measure->add_subcommand("parse", "parse and print the AST");
    mparse->add_option("file", measure_file)->required();
    auto* mcheck = measure->add_subcommand("check", "semantic checks and binding");
    mcheck->add_option("file", measure_file)->required();
    mcheck->add_option("--nffg", nffg_for_bind, "bind against this NF-FG");

    // graph check
    auto* graph = app.add_subcommand("graph", "forwarding graph tools");
    graph->require_subcommand(1);
    auto* gcheck = graph->add_subcommand("check", "topology property check");
    std::string gfile, gproperty, gsrc, gdst, gmb;
    gcheck->add_option("nffg", gfile)->required();
    gcheck->add_option("--property", gproperty, "reach|isolate|traverse")->required();
    gcheck->add_option("--src", gsrc)->required();
    gcheck->add_option("--dst", gdst)->required();
    gcheck->add_option("--mb", gmb, "middlebox node");

    // query run
    auto* query = app.add_subcommand("query", "recursive metric queries");
    query->require_subcommand(1);
    auto* qrun = query->add_subcommand("run", "run one query");
    std::string qnffg, qstore, qmetric, qtarget, qsrc, qdst, qrules, qcombiner;
    qrun->add_option("--nffg", qnffg)->required();
    qrun->add_option("--store", qstore, "metric store snapshot")->required();
    qrun->add_option("--metric", qmetric)->required();
    qrun->add_option("--target", qtarget);
    qrun->add_option("--src", qsrc);
    qrun->add_option("--dst", qdst);
    qrun->add_option("--rules", qrules, "custom rule file");
    qrun->add_option("--combiner", qcombiner, "parallel path combiner: max|min|mean");

    // broker run
    auto* brk = app.add_subcommand("broker", "messaging fabric");
    brk->require_subcommand(1);
    auto* brun = brk->add_subcommand("run", "run a broker");
    std::string blisten = ":7000", bparent, bname = "broker";
    brun->add_option("--listen", blisten, "[host]:port to listen on");
    brun->add_option("--parent", bparent, "parent broker host:port");
    brun->add_option("--name", bname, "broker id");

    // sim run
    auto* sim = app.add_subcommand("sim", "scenario simulation");
    sim->require_subcommand(1);
    auto* srun = sim->add_subcommand("run", "run a scenario config");
    std::string sconfig, sout;
    std::uint64_t sseed = 0;
    srun->add_option("config", sconfig)->required();
    srun->add_option("--seed", sseed, "override the config seed");
    srun->add_option("--out", sout, "write the report JSON here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    if (mparse->parsed()) return cmd_measure("parse", measure_file, "", json_out);
    if (mcheck->parsed())
        return cmd_measure("check", measure_file, nffg_for_bind, json_out);
    if (gcheck->parsed())
        return cmd_graph_check(gfile, gproperty, gsrc, gdst, gmb, json_out);
    if (qrun->parsed())
        return cmd_query_run(qnffg, qstore, qmetric, qtarget, qsrc, qdst, qrules,
                             qcombiner, json_out);
    if (brun->parsed()) return cmd_broker_run(blisten, bparent, bname);
    if (srun->parsed()) return cmd_sim_run(sconfig, sseed, sout);
    return kUsage;
}
