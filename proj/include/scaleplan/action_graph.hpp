#pragma once

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scaleplan/pddl.hpp"

namespace scaleplan {

enum class EdgeKind { Strict, Relaxed };

inline const char* to_string(EdgeKind k) { return k == EdgeKind::Strict ? "strict" : "relaxed"; }

struct GraphEdge {
    std::string from;
    std::string to;
    EdgeKind kind;

    auto operator<=>(const GraphEdge&) const = default;
};

struct ActionGraph {
    std::vector<std::string> nodes;  // sorted
    std::vector<GraphEdge> edges;    // sorted by (from, to)

    bool has_node(const std::string& n) const {
        return std::binary_search(nodes.begin(), nodes.end(), n);
    }

    bool has_edge(const std::string& from, const std::string& to) const {
        for (const auto& e : edges)
            if (e.from == from && e.to == to) return true;
        return false;
    }

    size_t count(EdgeKind k) const {
        size_t n = 0;
        for (const auto& e : edges)
            if (e.kind == k) ++n;
        return n;
    }
};

// Lifted coverage test: an add-effect of one schema can supply a precondition
// of another iff the predicate matches and every argument type pair is
// unifiable (equal or related through the hierarchy in either direction).
// Variable identity across schemas is deliberately ignored; edges are built
// offline over parameterized schemas, not groundings.
inline bool covers(const Literal& eff, const Literal& pre, const TypeHierarchy& types) {
    if (eff.pred != pre.pred) return false;
    if (eff.args.size() != pre.args.size()) throw ArityMismatch(eff.pred);
    for (size_t i = 0; i < eff.args.size(); ++i)
        if (!types.unifiable(eff.args[i].type, pre.args[i].type)) return false;
    return true;
}

namespace detail {

inline bool covers_all_preconditions(const ActionSchema& a1, const ActionSchema& a2,
                                     const TypeHierarchy& types) {
    for (const auto& pre : a2.preconditions) {
        bool covered = false;
        for (const auto& eff : a1.add_effects)
            if (covers(eff, pre, types)) {
                covered = true;
                break;
            }
        if (!covered) return false;
    }
    return true;
}

inline bool overlaps(const ActionSchema& a1, const ActionSchema& a2, const TypeHierarchy& types) {
    for (const auto& pre : a2.preconditions)
        for (const auto& eff : a1.add_effects)
            if (covers(eff, pre, types)) return true;
    return false;
}

}  // namespace detail

// Two-phase construction. Strict edges first: a1 -> a2 when the add-effects
// of a1 cover every precondition of a2 (an empty precondition set is covered
// vacuously). Relaxed edges are then added for partial overlap, but only
// where strictness is absent: no strict a1 -> a2 edge, and a2 has no incoming
// strict edge or a1 has no outgoing strict edge. Self-loops exist only in the
// strict case. Effects mean add-effects throughout; deletions cannot supply
// a positive precondition.
inline ActionGraph build_graph(const Domain& domain) {
    ActionGraph g;
    for (const auto& a : domain.actions) g.nodes.push_back(a.name);
    std::sort(g.nodes.begin(), g.nodes.end());

    std::set<std::pair<std::string, std::string>> strict;
    std::set<std::string> has_in_strict, has_out_strict;
    for (const auto& a1 : domain.actions)
        for (const auto& a2 : domain.actions)
            if (detail::covers_all_preconditions(a1, a2, domain.types)) {
                strict.emplace(a1.name, a2.name);
                has_in_strict.insert(a2.name);
                has_out_strict.insert(a1.name);
            }

    for (const auto& [from, to] : strict) g.edges.push_back({from, to, EdgeKind::Strict});

    for (const auto& a1 : domain.actions)
        for (const auto& a2 : domain.actions) {
            if (a1.name == a2.name) continue;
            if (strict.count({a1.name, a2.name})) continue;
            if (has_in_strict.count(a2.name) && has_out_strict.count(a1.name)) continue;
            if (detail::overlaps(a1, a2, domain.types))
                g.edges.push_back({a1.name, a2.name, EdgeKind::Relaxed});
        }

    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

struct ReachableSet {
    std::vector<std::string> terminals;  // sorted
    std::vector<std::string> members;    // sorted
    std::vector<GraphEdge> witness_edges;

    bool contains(const std::string& n) const {
        return std::binary_search(members.begin(), members.end(), n);
    }
};

// Backward DFS from the terminals, traversing both edge kinds in reverse.
// A visited set makes cycles terminate; the member set is independent of
// traversal order.
inline ReachableSet backward_reachable(const ActionGraph& graph,
                                       const std::vector<std::string>& terminals) {
    ReachableSet result;
    for (const auto& t : terminals) {
        if (!graph.has_node(t)) throw UnknownTerminal(t);
        result.terminals.push_back(t);
    }
    std::sort(result.terminals.begin(), result.terminals.end());
    result.terminals.erase(std::unique(result.terminals.begin(), result.terminals.end()),
                           result.terminals.end());

    std::set<std::string> visited(result.terminals.begin(), result.terminals.end());
    std::vector<std::string> stack(result.terminals.begin(), result.terminals.end());
    while (!stack.empty()) {
        std::string node = stack.back();
        stack.pop_back();
        for (const auto& e : graph.edges)
            if (e.to == node && !visited.count(e.from)) {
                visited.insert(e.from);
                stack.push_back(e.from);
            }
    }
    result.members.assign(visited.begin(), visited.end());
    for (const auto& e : graph.edges)
        if (visited.count(e.to)) result.witness_edges.push_back(e);
    return result;
}

// DOT export; strict edges solid, relaxed dashed. Nodes and edges are emitted
// in lexicographic order so diffs stay stable.
inline std::string to_dot(const ActionGraph& graph) {
    if (graph.nodes.empty() && graph.edges.empty()) return "digraph actions { }\n";
    std::ostringstream out;
    out << "digraph actions {\n";
    for (const auto& n : graph.nodes) out << "  \"" << n << "\";\n";
    for (const auto& e : graph.edges)
        out << "  \"" << e.from << "\" -> \"" << e.to << "\" [style="
            << (e.kind == EdgeKind::Strict ? "solid" : "dashed") << "];\n";
    out << "}\n";
    return out.str();
}

inline nlohmann::json graph_to_json(const ActionGraph& graph) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : graph.edges)
        edges.push_back({{"from", e.from}, {"to", e.to}, {"kind", to_string(e.kind)}});
    return {{"nodes", graph.nodes}, {"edges", edges}};
}

}  // namespace scaleplan
