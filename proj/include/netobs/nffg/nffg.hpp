#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace netobs::nffg {

enum class NodeKind { Vnf, Sap, Port };

NodeKind node_kind_from(const std::string& s);
const char* to_string(NodeKind k);

struct Node {
    std::string id;
    NodeKind kind = NodeKind::Vnf;
    std::map<std::string, std::string> attrs;
};

struct Link {
    std::string src;
    std::string dst;
    std::map<std::string, std::string> attrs;
};

/// Hierarchical forwarding graph. Children hold the finer-grained
/// realizations referenced from `decompositions`.
struct NfFg {
    std::string id;
    std::vector<Node> nodes;
    std::vector<Link> links;
    std::map<std::string, std::string> decompositions;  // node id -> child graph id
    std::vector<NfFg> children;

    const Node* find_node(const std::string& id) const;
    const NfFg* find_child(const std::string& graph_id) const;

    /// This graph plus all nested graphs, depth-first.
    std::vector<const NfFg*> all_graphs() const;

    /// Every id a MEASURE argument may refer to: node ids at all levels,
    /// link "id" attributes, and graph ids.
    std::unordered_set<std::string> entity_ids() const;
};

class SchemaError : public std::runtime_error {
public:
    SchemaError(const std::string& path, const std::string& reason)
        : std::runtime_error(path + ": " + reason) {}
};
class DanglingLink : public std::runtime_error {
public:
    explicit DanglingLink(const std::string& endpoint)
        : std::runtime_error("link endpoint '" + endpoint + "' does not exist") {}
};
class CyclicDecomposition : public std::runtime_error {
public:
    explicit CyclicDecomposition(const std::string& id)
        : std::runtime_error("decomposition cycle through graph '" + id + "'") {}
};
class UnknownNode : public std::runtime_error {
public:
    explicit UnknownNode(const std::string& id)
        : std::runtime_error("unknown node '" + id + "'") {}
};

/// Parse and validate an NF-FG JSON document.
NfFg load(const std::string& json_text);
NfFg load_file(const std::string& path);

/// Ground-fact projection: node/1, link/2, sub/2.
struct Fact {
    std::string pred;
    std::vector<std::string> args;
    bool operator==(const Fact&) const = default;
    bool operator<(const Fact& o) const {
        return pred != o.pred ? pred < o.pred : args < o.args;
    }
};

std::vector<Fact> to_facts(const NfFg& g);

struct PathsResult {
    std::vector<std::vector<std::string>> paths;  // lexicographic order
    bool truncated = false;
};

/// All simple directed paths src -> dst at this graph's level. SAPs may
/// appear only as endpoints. src == dst yields the zero-length path.
PathsResult paths(const NfFg& g, const std::string& src, const std::string& dst,
                  std::size_t max_paths = 10000);

enum class PropertyKind { Reachability, Isolation, NodeTraversal };

struct Property {
    PropertyKind kind;
    std::string src;
    std::string dst;
    std::string middlebox;  // Isolation / NodeTraversal
};

struct CheckResult {
    bool holds = false;
    std::optional<std::vector<std::string>> witness;
    bool vacuous = false;  // no path exists at all
};

/// Topology-level property check by path enumeration. With no src->dst
/// path, Reachability fails while Isolation and NodeTraversal hold
/// vacuously.
CheckResult check(const NfFg& g, const Property& prop);

} // namespace netobs::nffg
