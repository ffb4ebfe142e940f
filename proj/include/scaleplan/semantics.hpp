#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "scaleplan/pddl.hpp"

namespace scaleplan {

inline bool applicable(const State& state, const GroundAction& action, const Domain& domain) {
    const ActionSchema* schema = domain.find_action(action.schema);
    if (!schema) throw UnknownSchema(action.schema);
    if (schema->arity() != action.binding.size())
        throw TypeCheckError("action " + action.str() + " binds " + std::to_string(action.binding.size()) +
                             " objects, schema has arity " + std::to_string(schema->arity()));
    for (const auto& pre : schema->preconditions)
        if (!state.contains(bind_literal(pre, *schema, action.binding))) return false;
    return true;
}

// First precondition (in declaration order) missing from `state`.
inline std::optional<GroundAtom> first_unsatisfied(const State& state, const GroundAction& action,
                                                   const Domain& domain) {
    const ActionSchema* schema = domain.find_action(action.schema);
    if (!schema) throw UnknownSchema(action.schema);
    for (const auto& pre : schema->preconditions) {
        GroundAtom g = bind_literal(pre, *schema, action.binding);
        if (!state.contains(g)) return g;
    }
    return std::nullopt;
}

inline State apply(const State& state, const GroundAction& action, const Domain& domain) {
    if (auto missing = first_unsatisfied(state, action, domain))
        throw NotApplicable(action.str(), missing->str());
    const ActionSchema* schema = domain.find_action(action.schema);
    State next = state;
    for (const auto& del : schema->del_effects) next.erase(bind_literal(del, *schema, action.binding));
    for (const auto& add : schema->add_effects) next.insert(bind_literal(add, *schema, action.binding));
    return next;
}

struct ValidationStep {
    size_t index = 0;
    GroundAction action;
    bool applicable = false;
    std::optional<GroundAtom> failed_precondition;
    std::string note;  // non-empty for structural problems (unknown schema etc.)
};

struct ValidationReport {
    std::vector<ValidationStep> steps;
    State final_state;
    bool goal_satisfied = false;
    bool valid = false;
};

// Executes the plan from I. Steps that fail are recorded and skipped so the
// report can describe partial failures; the plan is valid only if every step
// applied and the final state covers G.
inline ValidationReport validate_plan(const ProblemInstance& instance, const Plan& plan,
                                      const Domain& domain) {
    ValidationReport report;
    State state{std::vector<GroundAtom>(instance.init)};
    for (size_t i = 0; i < plan.steps.size(); ++i) {
        ValidationStep step;
        step.index = i;
        step.action = plan.steps[i];
        try {
            step.failed_precondition = first_unsatisfied(state, plan.steps[i], domain);
            step.applicable = !step.failed_precondition.has_value();
            if (step.applicable) state = apply(state, plan.steps[i], domain);
        } catch (const Error& e) {
            step.applicable = false;
            step.note = e.what();
        }
        report.steps.push_back(std::move(step));
    }
    report.final_state = state;
    report.goal_satisfied = state.superset_of(instance.goal);
    report.valid = report.goal_satisfied;
    for (const auto& s : report.steps)
        if (!s.applicable) report.valid = false;
    return report;
}

// --- grounding --------------------------------------------------------------

// Dense-integer view of a ground instance. Atom ids intern GroundAtoms so
// search and heuristics work on ints; ops keep their enumeration order, which
// downstream code relies on for reproducible tie-breaking.
struct GroundTask {
    struct Op {
        GroundAction action;
        std::vector<int> pre, add, del;
    };

    std::vector<GroundAtom> atom_of_id;
    std::unordered_map<GroundAtom, int, GroundAtomHash> id_of_atom;
    std::vector<Op> ops;
    std::vector<int> init;  // sorted
    std::vector<int> goal;  // sorted
    bool goal_relaxed_reachable = false;

    int intern(const GroundAtom& a) {
        auto it = id_of_atom.find(a);
        if (it != id_of_atom.end()) return it->second;
        int id = static_cast<int>(atom_of_id.size());
        atom_of_id.push_back(a);
        id_of_atom.emplace(a, id);
        return id;
    }

    int lookup(const GroundAtom& a) const {
        auto it = id_of_atom.find(a);
        return it == id_of_atom.end() ? -1 : it->second;
    }
};

namespace detail {

// Objects grouped per declared type, each group sorted for determinism.
inline std::map<std::string, std::vector<std::string>> objects_by_type(const ProblemInstance& inst) {
    std::map<std::string, std::vector<std::string>> by_type;
    for (const auto& [name, type] : inst.objects) by_type[type].push_back(name);
    for (auto& [t, objs] : by_type) std::sort(objs.begin(), objs.end());
    return by_type;
}

inline std::vector<std::string> objects_of_type(const ProblemInstance& inst, const Domain& domain,
                                                const std::string& want) {
    std::vector<std::string> out;
    for (const auto& [name, type] : inst.objects)
        if (domain.types.is_subtype(type, want)) out.push_back(name);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

// Enumerates all type-consistent bindings of every schema, then drops actions
// that can never fire under the delete relaxation of I (their preconditions
// contain an atom no add-effect chain can reach).
inline GroundTask ground_task(const ProblemInstance& instance, const Domain& domain) {
    GroundTask task;
    for (const auto& atom : instance.init) task.init.push_back(task.intern(atom));
    std::sort(task.init.begin(), task.init.end());
    task.init.erase(std::unique(task.init.begin(), task.init.end()), task.init.end());

    // Candidate ops in schema declaration order, bindings in lexicographic
    // object order per parameter.
    std::vector<GroundTask::Op> candidates;
    for (const auto& schema : domain.actions) {
        std::vector<std::vector<std::string>> pools;
        bool empty_pool = false;
        for (const auto& p : schema.params) {
            pools.push_back(detail::objects_of_type(instance, domain, p.type));
            if (pools.back().empty()) empty_pool = true;
        }
        if (empty_pool) continue;

        std::vector<size_t> idx(pools.size(), 0);
        while (true) {
            GroundTask::Op op;
            op.action.schema = schema.name;
            for (size_t i = 0; i < pools.size(); ++i) op.action.binding.push_back(pools[i][idx[i]]);
            for (const auto& l : schema.preconditions)
                op.pre.push_back(task.intern(bind_literal(l, schema, op.action.binding)));
            for (const auto& l : schema.add_effects)
                op.add.push_back(task.intern(bind_literal(l, schema, op.action.binding)));
            for (const auto& l : schema.del_effects)
                op.del.push_back(task.intern(bind_literal(l, schema, op.action.binding)));
            for (auto* v : {&op.pre, &op.add, &op.del}) {
                std::sort(v->begin(), v->end());
                v->erase(std::unique(v->begin(), v->end()), v->end());
            }
            candidates.push_back(std::move(op));

            // odometer increment
            size_t k = pools.size();
            while (k > 0) {
                --k;
                if (++idx[k] < pools[k].size()) break;
                idx[k] = 0;
                if (k == 0) goto next_schema;
            }
            if (pools.empty()) break;
        }
    next_schema:;
    }

    // Counting-based relaxed reachability from I.
    std::vector<char> reached(task.atom_of_id.size(), 0);
    std::vector<int> queue;
    for (int a : task.init)
        if (!reached[a]) {
            reached[a] = 1;
            queue.push_back(a);
        }
    std::vector<int> unsat(candidates.size());
    std::vector<std::vector<int>> waiting(task.atom_of_id.size());
    std::vector<char> fired(candidates.size(), 0);
    std::vector<int> ready;
    for (size_t i = 0; i < candidates.size(); ++i) {
        int missing = 0;
        for (int p : candidates[i].pre)
            if (!reached[p]) {
                ++missing;
                waiting[p].push_back(static_cast<int>(i));
            }
        unsat[i] = missing;
        if (missing == 0) ready.push_back(static_cast<int>(i));
    }
    while (!ready.empty()) {
        int op_idx = ready.back();
        ready.pop_back();
        if (fired[op_idx]) continue;
        fired[op_idx] = 1;
        for (int a : candidates[op_idx].add) {
            if (reached[a]) continue;
            reached[a] = 1;
            for (int waiter : waiting[a])
                if (--unsat[waiter] == 0) ready.push_back(waiter);
        }
    }

    for (size_t i = 0; i < candidates.size(); ++i)
        if (fired[i]) task.ops.push_back(std::move(candidates[i]));

    task.goal_relaxed_reachable = true;
    for (const auto& atom : instance.goal) {
        int id = task.intern(atom);
        task.goal.push_back(id);
        if (id >= static_cast<int>(reached.size()) || !reached[id]) task.goal_relaxed_reachable = false;
    }
    std::sort(task.goal.begin(), task.goal.end());
    task.goal.erase(std::unique(task.goal.begin(), task.goal.end()), task.goal.end());
    return task;
}

inline std::vector<GroundAction> ground_instance(const ProblemInstance& instance, const Domain& domain) {
    GroundTask task = ground_task(instance, domain);
    std::vector<GroundAction> out;
    out.reserve(task.ops.size());
    for (const auto& op : task.ops) out.push_back(op.action);
    return out;
}

}  // namespace scaleplan
