#pragma once

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "scaleplan/action_graph.hpp"
#include "scaleplan/pddl.hpp"
#include "scaleplan/writer.hpp"

namespace scaleplan {

inline constexpr const char* kWildcard = "*";

// A candidate terminal action proposed for the task, possibly with some
// parameters left open.
struct SeedAction {
    std::string schema;
    std::vector<std::string> binding;  // object names or "*"

    std::string str() const {
        std::string s = schema + "(";
        for (size_t i = 0; i < binding.size(); ++i) {
            if (i) s += ",";
            s += binding[i];
        }
        return s + ")";
    }

    bool operator==(const SeedAction&) const = default;
};

inline void validate_seed(const SeedAction& seed, const Domain& domain, const ProblemInstance& inst) {
    const ActionSchema* schema = domain.find_action(seed.schema);
    if (!schema) throw UnknownSchema(seed.schema);
    if (seed.binding.size() != schema->arity())
        throw TypeCheckError("seed " + seed.str() + ": expected " + std::to_string(schema->arity()) +
                             " arguments");
    for (size_t i = 0; i < seed.binding.size(); ++i) {
        if (seed.binding[i] == kWildcard) continue;
        const std::string* ty = inst.object_type(seed.binding[i]);
        if (!ty) throw TypeCheckError("seed " + seed.str() + ": unknown object " + seed.binding[i]);
        if (!domain.types.is_subtype(*ty, schema->params[i].type))
            throw TypeCheckError("seed " + seed.str() + ": object " + seed.binding[i] + " of type " +
                                 *ty + " does not fit parameter type " + schema->params[i].type);
    }
}

inline std::set<std::string> filter_actions(const Domain& domain, const ActionGraph& graph,
                                            const std::vector<SeedAction>& seeds) {
    if (seeds.empty()) throw EmptySeeds();
    std::vector<std::string> terminals;
    for (const auto& s : seeds) terminals.push_back(s.schema);
    ReachableSet reach = backward_reachable(graph, terminals);
    return {reach.members.begin(), reach.members.end()};
}

namespace detail {

inline bool action_mentions_predicate(const ActionSchema& a, const std::string& pred) {
    for (const auto* set : {&a.preconditions, &a.add_effects, &a.del_effects})
        for (const auto& l : *set)
            if (l.pred == pred) return true;
    return false;
}

}  // namespace detail

// Least fixpoint of object relevance: an init atom whose predicate is used by
// a kept action propagates relevance from any kept object it mentions to the
// rest of its arguments. A final repair pass admits every object of any
// kept-action parameter type that ended up with no kept object, so kept
// actions stay groundable.
inline std::set<std::string> relevance_closure(const ProblemInstance& instance, const Domain& domain,
                                               const std::set<std::string>& kept_actions,
                                               const std::set<std::string>& seed_objects,
                                               bool type_repair = true) {
    std::set<std::string> relevant_preds;
    for (const auto& name : kept_actions) {
        const ActionSchema* a = domain.find_action(name);
        if (!a) throw UnknownSchema(name);
        for (const auto* set : {&a->preconditions, &a->add_effects, &a->del_effects})
            for (const auto& l : *set) relevant_preds.insert(l.pred);
    }

    std::set<std::string> kept = seed_objects;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& atom : instance.init) {
            if (!relevant_preds.count(atom.pred)) continue;
            bool touches_kept = false;
            for (const auto& arg : atom.args)
                if (kept.count(arg)) {
                    touches_kept = true;
                    break;
                }
            if (!touches_kept) continue;
            for (const auto& arg : atom.args)
                if (kept.insert(arg).second) changed = true;
        }
    }

    // type-coverage repair
    if (!type_repair) return kept;
    for (const auto& name : kept_actions) {
        const ActionSchema* a = domain.find_action(name);
        for (const auto& param : a->params) {
            bool covered = false;
            for (const auto& obj : kept) {
                const std::string* ty = instance.object_type(obj);
                if (ty && domain.types.is_subtype(*ty, param.type)) {
                    covered = true;
                    break;
                }
            }
            if (covered) continue;
            for (const auto& [obj, ty] : instance.objects)
                if (domain.types.is_subtype(ty, param.type)) kept.insert(obj);
        }
    }
    return kept;
}

// The reduced instance: original goal and task text, actions cut down to the
// backward-reachable set, objects cut down by the relevance closure, init
// restricted to atoms over kept objects.
struct FilteredInstance {
    const ProblemInstance* base = nullptr;
    std::set<std::string> kept_actions;
    std::set<std::string> kept_objects;
    std::vector<GroundAtom> kept_init;

    const std::vector<GroundAtom>& goal() const { return base->goal; }

    ProblemInstance to_problem() const {
        ProblemInstance p;
        p.name = base->name + "-filtered";
        p.domain_name = base->domain_name;
        for (const auto& [n, t] : base->objects)
            if (kept_objects.count(n)) p.objects.emplace_back(n, t);
        p.init = kept_init;
        p.goal = base->goal;
        p.task_text = base->task_text;
        p.display = base->display;
        return p;
    }

    Domain to_domain(const Domain& full) const {
        Domain d = full;
        d.actions.clear();
        for (const auto& a : full.actions)
            if (kept_actions.count(a.name)) d.actions.push_back(a);
        return d;
    }

    nlohmann::json to_json() const {
        nlohmann::json init = nlohmann::json::array();
        for (const auto& a : kept_init) init.push_back(atom_to_json(a));
        nlohmann::json goal_j = nlohmann::json::array();
        for (const auto& a : base->goal) goal_j.push_back(atom_to_json(a));
        return {{"base", base->name},
                {"kept_actions", std::vector<std::string>(kept_actions.begin(), kept_actions.end())},
                {"kept_objects", std::vector<std::string>(kept_objects.begin(), kept_objects.end())},
                {"kept_init", init},
                {"goal", goal_j}};
    }
};

// Robot-typed objects survive filtering unconditionally: the team is part of
// the instance even when a robot ends up with no subtask.
inline std::set<std::string> robot_objects(const ProblemInstance& instance, const Domain& domain) {
    std::set<std::string> out;
    if (!domain.types.contains("robot")) return out;
    for (const auto& [name, type] : instance.objects)
        if (domain.types.is_subtype(type, "robot")) out.insert(name);
    return out;
}

inline FilteredInstance build_filtered_instance(const ProblemInstance& instance, const Domain& domain,
                                                const ActionGraph& graph,
                                                const std::vector<SeedAction>& seeds) {
    for (const auto& s : seeds) validate_seed(s, domain, instance);

    FilteredInstance f;
    f.base = &instance;
    f.kept_actions = filter_actions(domain, graph, seeds);

    std::set<std::string> seed_objects = robot_objects(instance, domain);
    for (const auto& s : seeds)
        for (const auto& b : s.binding)
            if (b != kWildcard) seed_objects.insert(b);

    f.kept_objects = relevance_closure(instance, domain, f.kept_actions, seed_objects);

    for (const auto& atom : instance.init) {
        bool all_kept = true;
        for (const auto& arg : atom.args)
            if (!f.kept_objects.count(arg)) {
                all_kept = false;
                break;
            }
        if (all_kept) f.kept_init.push_back(atom);
    }

    for (const auto& atom : instance.goal)
        for (const auto& arg : atom.args)
            if (!f.kept_objects.count(arg))
                throw FilterTooAggressive("goal atom " + atom.str() + " references excluded object '" +
                                          arg + "'");
    return f;
}

}  // namespace scaleplan
