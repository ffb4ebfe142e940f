#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <future>
#include <limits>
#include <queue>
#include <unordered_set>

#include <json.hpp>

#include "scaleplan/relevance_filter.hpp"
#include "scaleplan/semantics.hpp"

namespace scaleplan {

inline constexpr int64_t kCostInf = std::numeric_limits<int64_t>::max() / 4;

enum class SearchStrategy { Gbfs, Bfs };
enum class HeuristicKind { HAdd, GoalCount, Zero };

struct SearchConfig {
    SearchStrategy strategy = SearchStrategy::Gbfs;
    HeuristicKind heuristic = HeuristicKind::HAdd;
    int64_t max_expansions = 1'000'000;
};

struct SearchStats {
    int64_t expanded = 0;
    int64_t generated = 0;
    int64_t ground_actions = 0;
    double wall_time = 0.0;
    std::optional<int> plan_length;

    nlohmann::json to_json() const {
        nlohmann::json j = {{"expanded", expanded},
                            {"generated", generated},
                            {"ground_actions", ground_actions},
                            {"wall_time", wall_time}};
        j["plan_length"] = plan_length ? nlohmann::json(*plan_length) : nlohmann::json();
        return j;
    }
};

enum class SolveStatus { Solved, Unsolvable, Exhausted };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Solved: return "solved";
        case SolveStatus::Unsolvable: return "unsolvable";
        case SolveStatus::Exhausted: return "exhausted";
    }
    return "?";
}

struct SolveResult {
    SolveStatus status = SolveStatus::Unsolvable;
    Plan plan;
    SearchStats stats;

    bool solved() const { return status == SolveStatus::Solved; }
};

// Additive delete-relaxation estimate. Atoms in the state cost 0; any other
// atom costs the cheapest 1 + sum-of-precondition-costs over its achievers,
// computed to fixpoint Dijkstra-style. The goal costs the sum of its atoms,
// kCostInf if any atom is unreachable in the relaxation.
inline int64_t h_add(const GroundTask& task, const std::vector<int>& state_atoms) {
    const size_t n_atoms = task.atom_of_id.size();
    std::vector<int64_t> cost(n_atoms, kCostInf);
    std::vector<int> unsat(task.ops.size());
    std::vector<int64_t> acc(task.ops.size(), 0);  // sum of finalized precondition costs
    std::vector<std::vector<int>> waiting(n_atoms);
    for (size_t i = 0; i < task.ops.size(); ++i) {
        unsat[i] = static_cast<int>(task.ops[i].pre.size());
        for (int p : task.ops[i].pre) waiting[p].push_back(static_cast<int>(i));
    }

    using Entry = std::pair<int64_t, int>;  // (cost, atom)
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    for (int a : state_atoms) {
        cost[a] = 0;
        open.push({0, a});
    }
    std::vector<char> done(n_atoms, 0);
    auto fire = [&](size_t op_idx) {
        int64_t op_cost = 1 + acc[op_idx];
        for (int a : task.ops[op_idx].add)
            if (op_cost < cost[a]) {
                cost[a] = op_cost;
                open.push({op_cost, a});
            }
    };
    for (size_t i = 0; i < task.ops.size(); ++i)
        if (unsat[i] == 0) fire(i);
    while (!open.empty()) {
        auto [c, a] = open.top();
        open.pop();
        if (done[a]) continue;
        done[a] = 1;
        for (int op_idx : waiting[a]) {
            acc[op_idx] += c;
            if (--unsat[op_idx] == 0) fire(op_idx);
        }
    }

    int64_t total = 0;
    for (int g : task.goal) {
        if (cost[g] >= kCostInf) return kCostInf;
        total += cost[g];
    }
    return total;
}

namespace detail {

struct IntVecHash {
    size_t operator()(const std::vector<int>& v) const {
        size_t h = 1469598103934665603ull;
        for (int x : v) {
            h ^= static_cast<size_t>(x) + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
        }
        return h;
    }
};

inline bool subset_sorted(const std::vector<int>& sub, const std::vector<int>& super) {
    return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

inline std::vector<int> successor_state(const std::vector<int>& state, const GroundTask::Op& op) {
    std::vector<int> next;
    next.reserve(state.size() + op.add.size());
    std::set_difference(state.begin(), state.end(), op.del.begin(), op.del.end(),
                        std::back_inserter(next));
    std::vector<int> merged;
    merged.reserve(next.size() + op.add.size());
    std::set_union(next.begin(), next.end(), op.add.begin(), op.add.end(),
                   std::back_inserter(merged));
    return merged;
}

inline int64_t evaluate(HeuristicKind kind, const GroundTask& task, const std::vector<int>& state) {
    switch (kind) {
        case HeuristicKind::Zero:
            return 0;
        case HeuristicKind::GoalCount: {
            int64_t missing = 0;
            for (int g : task.goal)
                if (!std::binary_search(state.begin(), state.end(), g)) ++missing;
            return missing;
        }
        case HeuristicKind::HAdd:
            return h_add(task, state);
    }
    return 0;
}

}  // namespace detail

// Forward search over the grounded task. BFS returns a shortest plan; GBFS
// orders by heuristic with FIFO tie-breaking. Successors are generated in
// grounding order, so runs are reproducible expansion for expansion.
inline SolveResult solve(const ProblemInstance& instance, const Domain& domain,
                         const SearchConfig& config) {
    auto t0 = std::chrono::steady_clock::now();
    SolveResult result;
    GroundTask task = ground_task(instance, domain);
    result.stats.ground_actions = static_cast<int64_t>(task.ops.size());

    auto finish = [&](SolveStatus status) {
        result.status = status;
        result.stats.wall_time =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (status == SolveStatus::Solved)
            result.stats.plan_length = static_cast<int>(result.plan.steps.size());
        return result;
    };

    if (!task.goal_relaxed_reachable) return finish(SolveStatus::Unsolvable);

    struct Node {
        std::vector<int> state;
        int parent = -1;
        int op = -1;
    };
    std::vector<Node> nodes;
    nodes.push_back({task.init, -1, -1});
    result.stats.generated = 1;

    auto extract_plan = [&](int idx) {
        std::vector<GroundAction> steps;
        for (int cur = idx; nodes[cur].parent >= 0; cur = nodes[cur].parent)
            steps.push_back(task.ops[nodes[cur].op].action);
        std::reverse(steps.begin(), steps.end());
        result.plan.steps = std::move(steps);
    };

    std::unordered_set<std::vector<int>, detail::IntVecHash> seen;
    seen.insert(task.init);

    if (detail::subset_sorted(task.goal, task.init)) {
        extract_plan(0);
        return finish(SolveStatus::Solved);
    }

    const bool bfs = config.strategy == SearchStrategy::Bfs;
    using PqEntry = std::tuple<int64_t, int64_t, int>;  // (h, tick, node)
    std::priority_queue<PqEntry, std::vector<PqEntry>, std::greater<>> open_pq;
    std::deque<int> open_fifo;
    int64_t tick = 0;
    if (bfs)
        open_fifo.push_back(0);
    else
        open_pq.push({detail::evaluate(config.heuristic, task, task.init), tick++, 0});

    while (bfs ? !open_fifo.empty() : !open_pq.empty()) {
        int idx;
        if (bfs) {
            idx = open_fifo.front();
            open_fifo.pop_front();
        } else {
            idx = std::get<2>(open_pq.top());
            open_pq.pop();
        }
        if (result.stats.expanded >= config.max_expansions) return finish(SolveStatus::Exhausted);
        ++result.stats.expanded;

        for (size_t op_idx = 0; op_idx < task.ops.size(); ++op_idx) {
            const auto& op = task.ops[op_idx];
            if (!detail::subset_sorted(op.pre, nodes[idx].state)) continue;
            std::vector<int> next = detail::successor_state(nodes[idx].state, op);
            if (!seen.insert(next).second) continue;
            ++result.stats.generated;
            bool is_goal = detail::subset_sorted(task.goal, next);
            nodes.push_back({std::move(next), idx, static_cast<int>(op_idx)});
            int node_id = static_cast<int>(nodes.size() - 1);
            if (is_goal) {
                extract_plan(node_id);
                return finish(SolveStatus::Solved);
            }
            if (bfs)
                open_fifo.push_back(node_id);
            else
                open_pq.push({detail::evaluate(config.heuristic, task, nodes[node_id].state), tick++,
                              node_id});
        }
    }
    return finish(SolveStatus::Unsolvable);
}

struct ComparisonReport {
    SolveResult original;
    SolveResult filtered;
    bool fell_back = false;  // FilterTooAggressive: filtered side reran the original instance
    bool filtered_plan_valid_on_original = false;
    std::string fallback_reason;

    nlohmann::json to_json() const {
        return {{"original", original.stats.to_json()},
                {"original_status", to_string(original.status)},
                {"filtered", filtered.stats.to_json()},
                {"filtered_status", to_string(filtered.status)},
                {"fell_back", fell_back},
                {"fallback_reason", fallback_reason},
                {"filtered_plan_valid_on_original", filtered_plan_valid_on_original}};
    }
};

inline ComparisonReport compare_runs(const ProblemInstance& instance, const FilteredInstance& filtered,
                                     const Domain& domain, const SearchConfig& config) {
    ComparisonReport report;
    ProblemInstance fp = filtered.to_problem();
    Domain fd = filtered.to_domain(domain);
    auto orig_future = std::async(std::launch::async, [&] { return solve(instance, domain, config); });
    report.filtered = solve(fp, fd, config);
    report.original = orig_future.get();
    if (report.filtered.solved()) {
        ValidationReport v = validate_plan(instance, report.filtered.plan, domain);
        report.filtered_plan_valid_on_original = v.valid;
        if (!v.valid)
            throw InternalError("filtered plan does not validate on the original instance");
    }
    return report;
}

// Seed-level entry: builds the filtered instance first and falls back to the
// original when filtering excludes a goal object.
inline ComparisonReport compare_runs(const ProblemInstance& instance, const Domain& domain,
                                     const ActionGraph& graph, const std::vector<SeedAction>& seeds,
                                     const SearchConfig& config) {
    try {
        FilteredInstance f = build_filtered_instance(instance, domain, graph, seeds);
        return compare_runs(instance, f, domain, config);
    } catch (const FilterTooAggressive& e) {
        ComparisonReport report;
        report.original = solve(instance, domain, config);
        report.filtered = report.original;
        report.fell_back = true;
        report.fallback_reason = e.what();
        report.filtered_plan_valid_on_original = report.filtered.solved();
        return report;
    }
}

}  // namespace scaleplan
