#include "netobs/nffg/nffg.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

namespace netobs::nffg {

using nlohmann::json;

NodeKind node_kind_from(const std::string& s) {
    if (s == "vnf") return NodeKind::Vnf;
    if (s == "sap") return NodeKind::Sap;
    if (s == "port") return NodeKind::Port;
    throw SchemaError("kind", "must be one of vnf|sap|port, got '" + s + "'");
}

const char* to_string(NodeKind k) {
    switch (k) {
        case NodeKind::Vnf: return "vnf";
        case NodeKind::Sap: return "sap";
        case NodeKind::Port: return "port";
    }
    return "?";
}

const Node* NfFg::find_node(const std::string& node_id) const {
    for (const auto& n : nodes)
        if (n.id == node_id) return &n;
    return nullptr;
}

const NfFg* NfFg::find_child(const std::string& graph_id) const {
    for (const auto& c : children)
        if (c.id == graph_id) return &c;
    return nullptr;
}

std::vector<const NfFg*> NfFg::all_graphs() const {
    std::vector<const NfFg*> out{this};
    for (const auto& c : children) {
        auto sub = c.all_graphs();
        out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
}

std::unordered_set<std::string> NfFg::entity_ids() const {
    std::unordered_set<std::string> ids;
    for (const NfFg* g : all_graphs()) {
        ids.insert(g->id);
        for (const auto& n : g->nodes) ids.insert(n.id);
        for (const auto& l : g->links) {
            auto it = l.attrs.find("id");
            if (it != l.attrs.end()) ids.insert(it->second);
        }
    }
    return ids;
}

namespace {

std::map<std::string, std::string> parse_attrs(const json& j, const std::string& path) {
    std::map<std::string, std::string> attrs;
    if (!j.contains("attrs")) return attrs;
    const json& a = j.at("attrs");
    if (!a.is_object()) throw SchemaError(path + ".attrs", "must be an object");
    for (auto it = a.begin(); it != a.end(); ++it) {
        if (it.value().is_string())
            attrs[it.key()] = it.value().get<std::string>();
        else
            attrs[it.key()] = it.value().dump();
    }
    return attrs;
}

NfFg parse_graph(const json& j, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path, "graph must be an object");
    NfFg g;
    if (!j.contains("id") || !j.at("id").is_string())
        throw SchemaError(path + ".id", "required string");
    g.id = j.at("id").get<std::string>();

    if (j.contains("nodes")) {
        const json& nodes = j.at("nodes");
        if (!nodes.is_array()) throw SchemaError(path + ".nodes", "must be an array");
        for (size_t i = 0; i < nodes.size(); ++i) {
            std::string npath = path + ".nodes[" + std::to_string(i) + "]";
            const json& nj = nodes[i];
            if (!nj.contains("id") || !nj.at("id").is_string())
                throw SchemaError(npath + ".id", "required string");
            Node n;
            n.id = nj.at("id").get<std::string>();
            if (nj.contains("kind"))
                n.kind = node_kind_from(nj.at("kind").get<std::string>());
            n.attrs = parse_attrs(nj, npath);
            g.nodes.push_back(std::move(n));
        }
    }

    if (j.contains("links")) {
        const json& links = j.at("links");
        if (!links.is_array()) throw SchemaError(path + ".links", "must be an array");
        for (size_t i = 0; i < links.size(); ++i) {
            std::string lpath = path + ".links[" + std::to_string(i) + "]";
            const json& lj = links[i];
            if (!lj.contains("src") || !lj.contains("dst"))
                throw SchemaError(lpath, "src and dst are required");
            Link l;
            l.src = lj.at("src").get<std::string>();
            l.dst = lj.at("dst").get<std::string>();
            l.attrs = parse_attrs(lj, lpath);
            g.links.push_back(std::move(l));
        }
    }

    if (j.contains("decompositions")) {
        const json& d = j.at("decompositions");
        if (!d.is_object())
            throw SchemaError(path + ".decompositions", "must be an object");
        for (auto it = d.begin(); it != d.end(); ++it) {
            if (!it.value().is_string())
                throw SchemaError(path + ".decompositions." + it.key(),
                                  "child graph id must be a string");
            g.decompositions[it.key()] = it.value().get<std::string>();
        }
    }

    if (j.contains("children")) {
        const json& c = j.at("children");
        if (!c.is_array()) throw SchemaError(path + ".children", "must be an array");
        for (size_t i = 0; i < c.size(); ++i)
            g.children.push_back(
                parse_graph(c[i], path + ".children[" + std::to_string(i) + "]"));
    }
    return g;
}

void validate(const NfFg& g, std::unordered_set<std::string>& all_node_ids,
              std::unordered_set<std::string>& graph_ids_on_path) {
    if (!graph_ids_on_path.insert(g.id).second) throw CyclicDecomposition(g.id);

    std::unordered_set<std::string> local_ids;
    for (const auto& n : g.nodes) {
        if (!local_ids.insert(n.id).second)
            throw SchemaError("nodes", "duplicate node id '" + n.id + "'");
        if (!all_node_ids.insert(n.id).second)
            throw SchemaError("nodes",
                              "node id '" + n.id + "' reused across graphs");
    }
    for (const auto& l : g.links) {
        if (!local_ids.count(l.src)) throw DanglingLink(l.src);
        if (!local_ids.count(l.dst)) throw DanglingLink(l.dst);
    }
    for (const auto& [node_id, graph_id] : g.decompositions) {
        if (!local_ids.count(node_id))
            throw SchemaError("decompositions",
                              "unknown node '" + node_id + "'");
        if (!g.find_child(graph_id))
            throw SchemaError("decompositions",
                              "child graph '" + graph_id + "' not declared");
    }
    for (const auto& c : g.children) validate(c, all_node_ids, graph_ids_on_path);
    graph_ids_on_path.erase(g.id);
}

} // namespace

NfFg load(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SchemaError("$", e.what());
    }
    NfFg g = parse_graph(j, "$");
    std::unordered_set<std::string> node_ids, path_ids;
    validate(g, node_ids, path_ids);
    return g;
}

NfFg load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError(path, "cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return load(ss.str());
}

std::vector<Fact> to_facts(const NfFg& g) {
    std::vector<Fact> facts;
    for (const NfFg* graph : g.all_graphs()) {
        for (const auto& n : graph->nodes) facts.push_back({"node", {n.id}});
        for (const auto& l : graph->links) facts.push_back({"link", {l.src, l.dst}});
        for (const auto& [parent, child_graph] : graph->decompositions) {
            const NfFg* child = graph->find_child(child_graph);
            for (const auto& n : child->nodes)
                facts.push_back({"sub", {parent, n.id}});
        }
    }
    return facts;
}

PathsResult paths(const NfFg& g, const std::string& src, const std::string& dst,
                  std::size_t max_paths) {
    const Node* s = g.find_node(src);
    const Node* d = g.find_node(dst);
    if (!s) throw UnknownNode(src);
    if (!d) throw UnknownNode(dst);

    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& n : g.nodes) adj[n.id];
    for (const auto& l : g.links) adj[l.src].push_back(l.dst);
    for (auto& [id, nexts] : adj) {
        (void)id;
        std::sort(nexts.begin(), nexts.end());
    }

    PathsResult result;
    if (src == dst) {
        result.paths.push_back({src});
        return result;
    }

    std::vector<std::string> path{src};
    std::unordered_set<std::string> on_path{src};
    std::function<void(const std::string&)> dfs = [&](const std::string& at) {
        if (result.truncated) return;
        for (const auto& next : adj[at]) {
            if (on_path.count(next)) continue;
            if (next == dst) {
                if (result.paths.size() >= max_paths) {
                    result.truncated = true;
                    return;
                }
                path.push_back(next);
                result.paths.push_back(path);
                path.pop_back();
                continue;
            }
            // interior hops may not be SAPs
            if (g.find_node(next)->kind == NodeKind::Sap) continue;
            path.push_back(next);
            on_path.insert(next);
            dfs(next);
            on_path.erase(next);
            path.pop_back();
        }
    };
    dfs(src);
    std::sort(result.paths.begin(), result.paths.end());
    return result;
}

CheckResult check(const NfFg& g, const Property& prop) {
    if (!g.find_node(prop.src)) throw UnknownNode(prop.src);
    if (!g.find_node(prop.dst)) throw UnknownNode(prop.dst);
    if (prop.kind != PropertyKind::Reachability && !g.find_node(prop.middlebox))
        throw UnknownNode(prop.middlebox);

    PathsResult pr = paths(g, prop.src, prop.dst);
    CheckResult result;
    result.vacuous = pr.paths.empty();

    auto contains_mb = [&](const std::vector<std::string>& p) {
        return std::find(p.begin(), p.end(), prop.middlebox) != p.end();
    };

    switch (prop.kind) {
        case PropertyKind::Reachability:
            result.holds = !pr.paths.empty();
            if (result.holds) result.witness = pr.paths.front();
            break;
        case PropertyKind::Isolation:
            result.holds = true;
            for (const auto& p : pr.paths) {
                if (contains_mb(p)) {
                    result.holds = false;
                    result.witness = p;  // violating path through the middlebox
                    break;
                }
            }
            break;
        case PropertyKind::NodeTraversal:
            result.holds = true;
            for (const auto& p : pr.paths) {
                if (!contains_mb(p)) {
                    result.holds = false;
                    result.witness = p;  // violating path avoiding the middlebox
                    break;
                }
            }
            if (result.holds && !pr.paths.empty()) result.witness = pr.paths.front();
            break;
    }
    return result;
}

} // namespace netobs::nffg
