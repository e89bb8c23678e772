#include "netobs/query/query.hpp"

#include <algorithm>
#include <set>

namespace netobs::query {

namespace {

const char* kDescRules =
    "desc(X, Y) :- sub(X, Y).\n"
    "desc(X, Y) :- sub(X, Z), desc(Z, Y).\n";

} // namespace

std::string link_tag(const std::string& src, const std::string& dst) {
    return src + "->" + dst;
}

QueryEngine::QueryEngine() {
    Library avg_cpu;
    avg_cpu.metric = "avg_cpu";
    avg_cpu.kind = Library::Kind::NodeAggregate;
    avg_cpu.rules_text = kDescRules;
    avg_cpu.primitive = "cpu";
    avg_cpu.leaf_agg = LeafAgg::Mean;
    avg_cpu.unit = "percent";
    register_library(avg_cpu);

    Library e2e_delay;
    e2e_delay.metric = "e2e_delay";
    e2e_delay.kind = Library::Kind::PathSum;
    e2e_delay.rules_text = "";
    e2e_delay.primitive = "delay";
    e2e_delay.path_combiner = PathCombiner::Max;
    e2e_delay.unit = "ms";
    register_library(e2e_delay);
}

void QueryEngine::register_library(const Library& lib) {
    // InvalidRule surfaces here, before the library becomes visible.
    auto rules = datalog::parse_rules(lib.rules_text);
    parsed_rules_[lib.metric] = std::move(rules);
    libs_[lib.metric] = lib;
}

bool QueryEngine::has_library(const std::string& metric) const {
    return libs_.count(metric) > 0;
}

std::vector<std::string> QueryEngine::expand_leaves(const Library& lib,
                                                    const nffg::NfFg& g,
                                                    const std::string& target) const {
    datalog::Database facts;
    facts.add_facts(nffg::to_facts(g));

    const auto& rules = parsed_rules_.at(lib.metric);
    datalog::Database db = datalog::eval_all(rules, facts);

    std::set<std::string> parents;  // nodes that decompose further
    for (const auto& row : db.rows("sub")) parents.insert(row[0].str());

    datalog::Atom pattern;
    pattern.pred = "desc";
    pattern.terms = {datalog::Term::constant(datalog::Value::symbol(target)),
                     datalog::Term::variable("Y")};

    std::vector<std::string> leaves;
    for (const auto& row : datalog::match(db, pattern)) {
        const std::string& id = row[1].str();
        if (!parents.count(id)) leaves.push_back(id);
    }
    if (leaves.empty() && !parents.count(target)) leaves.push_back(target);
    std::sort(leaves.begin(), leaves.end());
    leaves.erase(std::unique(leaves.begin(), leaves.end()), leaves.end());
    return leaves;
}

QueryResult QueryEngine::query_node_aggregate(const Library& lib,
                                              const QueryRequest& req,
                                              const nffg::NfFg& g,
                                              const store::MetricStore& metrics) const {
    bool known = false;
    for (const nffg::NfFg* graph : g.all_graphs())
        if (graph->find_node(req.target)) { known = true; break; }
    if (!known) throw UnknownTarget(req.target);

    QueryResult result;
    result.unit = lib.unit;
    result.trace.label = lib.metric + "(" + req.target + ")";

    double sum = 0, mn = 0, mx = 0;
    std::size_t n = 0;
    for (const std::string& leaf : expand_leaves(lib, g, req.target)) {
        auto r = metrics.query_range(lib.primitive, {{"node", leaf}}, req.t0, req.t1,
                                     store::Agg::Avg);
        TraceNode child;
        child.label = leaf;
        if (!r.scalar) {
            result.missing.push_back(lib.primitive + "(" + leaf + ")");
        } else {
            double v = *r.scalar;
            child.value = v;
            result.leaves.emplace_back(leaf, v);
            sum += v;
            mn = n == 0 ? v : std::min(mn, v);
            mx = n == 0 ? v : std::max(mx, v);
            ++n;
        }
        result.trace.children.push_back(std::move(child));
    }
    if (n > 0) {
        switch (lib.leaf_agg) {
            case LeafAgg::Mean: result.value = sum / (double)n; break;
            case LeafAgg::Min: result.value = mn; break;
            case LeafAgg::Max: result.value = mx; break;
            case LeafAgg::Sum: result.value = sum; break;
        }
    }
    result.trace.value = result.value;
    return result;
}

QueryResult QueryEngine::query_path_sum(const Library& lib, const QueryRequest& req,
                                        const nffg::NfFg& g,
                                        const store::MetricStore& metrics) const {
    // The queried abstraction level is the first graph holding both ends.
    const nffg::NfFg* level = nullptr;
    for (const nffg::NfFg* graph : g.all_graphs()) {
        if (graph->find_node(req.src) && graph->find_node(req.dst)) {
            level = graph;
            break;
        }
    }
    if (!level) throw UnknownTarget(req.src + "/" + req.dst);

    QueryResult result;
    result.unit = lib.unit;
    result.trace.label = lib.metric + "(" + req.src + ", " + req.dst + ")";

    auto pr = nffg::paths(*level, req.src, req.dst);
    bool first_path = true;
    double combined = 0, combined_sum = 0;
    std::size_t combined_n = 0;

    for (const auto& path : pr.paths) {
        double path_sum = 0;
        TraceNode path_node;
        path_node.label = "path";
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            std::string tag = link_tag(path[i], path[i + 1]);
            auto r = metrics.query_range(lib.primitive, {{"link", tag}}, req.t0,
                                         req.t1, store::Agg::Avg);
            TraceNode hop;
            hop.label = tag;
            if (!r.scalar) {
                result.missing.push_back(lib.primitive + "(" + tag + ")");
            } else {
                hop.value = *r.scalar;
                path_sum += *r.scalar;
                result.leaves.emplace_back(tag, *r.scalar);
            }
            path_node.children.push_back(std::move(hop));
        }
        path_node.value = path_sum;
        result.trace.children.push_back(std::move(path_node));

        if (first_path) {
            combined = path_sum;
            first_path = false;
        } else {
            switch (lib.path_combiner) {
                case PathCombiner::Max: combined = std::max(combined, path_sum); break;
                case PathCombiner::Min: combined = std::min(combined, path_sum); break;
                case PathCombiner::Mean: break;
            }
        }
        combined_sum += path_sum;
        ++combined_n;
    }
    if (lib.path_combiner == PathCombiner::Mean && combined_n > 0)
        combined = combined_sum / (double)combined_n;
    result.value = first_path ? 0.0 : combined;
    result.trace.value = result.value;
    return result;
}

QueryResult QueryEngine::query(const QueryRequest& req, const nffg::NfFg& g,
                               const store::MetricStore& metrics) const {
    auto it = libs_.find(req.metric);
    if (it == libs_.end()) throw UnknownMetric(req.metric);
    const Library& lib = it->second;
    if (lib.kind == Library::Kind::NodeAggregate)
        return query_node_aggregate(lib, req, g, metrics);
    return query_path_sum(lib, req, g, metrics);
}

} // namespace netobs::query
