#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netobs/datalog/datalog.hpp"
#include "netobs/nffg/nffg.hpp"
#include "netobs/store/store.hpp"

namespace netobs::query {

class UnknownMetric : public std::runtime_error {
public:
    explicit UnknownMetric(const std::string& m)
        : std::runtime_error("no query library registered for metric '" + m + "'") {}
};
class UnknownTarget : public std::runtime_error {
public:
    explicit UnknownTarget(const std::string& t)
        : std::runtime_error("target '" + t + "' not found in the graph") {}
};

enum class LeafAgg { Mean, Min, Max, Sum };
enum class PathCombiner { Max, Min, Mean };

/// A named query: Datalog rules for structural expansion plus the
/// aggregation recipe applied to the primitive values they select.
struct Library {
    std::string metric;               // e.g. avg_cpu, e2e_delay
    enum class Kind { NodeAggregate, PathSum } kind = Kind::NodeAggregate;
    std::string rules_text;           // expansion rules, parsed on register
    std::string primitive;            // store metric fetched per leaf/link
    LeafAgg leaf_agg = LeafAgg::Mean;
    PathCombiner path_combiner = PathCombiner::Max;
    std::string unit;
};

struct QueryRequest {
    std::string metric;
    std::string target;               // NodeAggregate
    std::string src, dst;             // PathSum
    std::int64_t t0 = std::numeric_limits<std::int64_t>::min();
    std::int64_t t1 = std::numeric_limits<std::int64_t>::max();
};

struct TraceNode {
    std::string label;
    std::optional<double> value;
    std::vector<TraceNode> children;
};

struct QueryResult {
    double value = 0;
    std::string unit;
    std::vector<std::pair<std::string, double>> leaves;  // contributing primitives
    std::vector<std::string> missing;                    // primitive gaps
    TraceNode trace;
};

/// Decomposes high-level metric queries over a hierarchical graph into
/// primitive store fetches and aggregates the results. Ships with
/// avg_cpu and e2e_delay libraries; register_library replaces by name.
class QueryEngine {
public:
    QueryEngine();

    void register_library(const Library& lib);
    bool has_library(const std::string& metric) const;

    QueryResult query(const QueryRequest& req, const nffg::NfFg& g,
                      const store::MetricStore& metrics) const;

    /// Leaf expansion used by NodeAggregate queries: all sub-descendants
    /// of target with no further decomposition (target itself if none).
    std::vector<std::string> expand_leaves(const Library& lib, const nffg::NfFg& g,
                                           const std::string& target) const;

private:
    std::map<std::string, Library> libs_;
    std::map<std::string, std::vector<datalog::Rule>> parsed_rules_;

    QueryResult query_node_aggregate(const Library& lib, const QueryRequest& req,
                                     const nffg::NfFg& g,
                                     const store::MetricStore& metrics) const;
    QueryResult query_path_sum(const Library& lib, const QueryRequest& req,
                               const nffg::NfFg& g,
                               const store::MetricStore& metrics) const;
};

/// Tag convention for primitive series: {"node": id} for node metrics,
/// {"link": "src->dst"} for link metrics.
std::string link_tag(const std::string& src, const std::string& dst);

} // namespace netobs::query
