#include <doctest.h>

#include <functional>
#include "scaleplan/planner.hpp"
#include "testsupport.hpp"
#include "testsupport_random.hpp"

using namespace scaleplan;

namespace testsupport {

// Iterative-deepening optimal-length oracle, independent of solve(): plain
// depth-limited DFS with a cycle check along the current path.
inline std::optional<int> iddfs_plan_length(const ProblemInstance& inst, const Domain& d,
                                            int max_depth) {
    std::vector<GroundAction> ground = ground_instance(inst, d);
    State init{std::vector<GroundAtom>(inst.init)};

    std::vector<State> path;
    std::function<bool(const State&, int)> dls = [&](const State& s, int remaining) {
        if (s.superset_of(inst.goal)) return true;
        if (remaining == 0) return false;
        for (const auto& prev : path)
            if (prev == s) return false;
        path.push_back(s);
        for (const auto& ga : ground) {
            if (!applicable(s, ga, d)) continue;
            if (dls(apply(s, ga, d), remaining - 1)) {
                path.pop_back();
                return true;
            }
        }
        path.pop_back();
        return false;
    };
    for (int depth = 0; depth <= max_depth; ++depth)
        if (dls(init, depth)) return depth;
    return std::nullopt;
}

// Count reachable states with a plain BFS (caps at `limit`).
inline size_t reachable_state_count(const ProblemInstance& inst, const Domain& d, size_t limit) {
    std::vector<GroundAction> ground = ground_instance(inst, d);
    std::set<std::vector<GroundAtom>> seen;
    std::vector<State> frontier = {State{std::vector<GroundAtom>(inst.init)}};
    seen.insert(frontier.back().atoms());
    while (!frontier.empty() && seen.size() < limit) {
        State s = frontier.back();
        frontier.pop_back();
        for (const auto& ga : ground) {
            if (!applicable(s, ga, d)) continue;
            State next = apply(s, ga, d);
            if (seen.insert(next.atoms()).second) frontier.push_back(next);
        }
    }
    return seen.size();
}

}  // namespace testsupport

TEST_CASE("h_add on the pick-place instance") {
    Domain d = testsupport::fig2_domain();
    ProblemInstance p = testsupport::fig3_problem(d);
    GroundTask task = ground_task(p, d);

    SUBCASE("one action achieves the goal") { CHECK(h_add(task, task.init) == 1); }
    SUBCASE("a goal state costs zero") {
        std::vector<int> satisfied = task.init;
        for (int g : task.goal) satisfied.push_back(g);
        std::sort(satisfied.begin(), satisfied.end());
        satisfied.erase(std::unique(satisfied.begin(), satisfied.end()), satisfied.end());
        CHECK(h_add(task, satisfied) == 0);
    }
    SUBCASE("unreachable goal atom costs infinity") {
        ProblemInstance q = p;
        q.goal = {GroundAtom{"at-obj", {"obj1", "locb"}}};
        GroundTask t2 = ground_task(q, d);
        CHECK(h_add(t2, t2.init) == kCostInf);
    }
}

TEST_CASE("h_add is zero exactly on goal states") {
    Domain d = testsupport::kitchen_domain();
    ProblemInstance p = testsupport::kitchen_problem(d);
    GroundTask task = ground_task(p, d);
    CHECK(h_add(task, task.init) > 0);
    CHECK((h_add(task, task.init) == 0) == detail::subset_sorted(task.goal, task.init));
}

TEST_CASE("bfs finds the single-step plan") {
    Domain d = testsupport::fig2_domain();
    ProblemInstance p = testsupport::fig3_problem(d);
    SearchConfig cfg;
    cfg.strategy = SearchStrategy::Bfs;
    SolveResult res = solve(p, d, cfg);
    REQUIRE(res.solved());
    CHECK(res.plan.steps == std::vector<GroundAction>{{"pick", {"r1", "obj1", "loca"}}});
    CHECK(res.stats.plan_length == 1);
    CHECK(res.stats.ground_actions == 1);
    CHECK(validate_plan(p, res.plan, d).valid);
}

TEST_CASE("satisfied goal yields the empty plan with no expansions") {
    Domain d = testsupport::fig2_domain();
    ProblemInstance p = testsupport::fig3_problem(d);
    p.goal = {GroundAtom{"at", {"r1", "loca"}}};
    SolveResult res = solve(p, d, SearchConfig{});
    REQUIRE(res.solved());
    CHECK(res.plan.steps.empty());
    CHECK(res.stats.expanded == 0);
}

TEST_CASE("gbfs solves the kitchen task at oracle length") {
    Domain d = testsupport::kitchen_domain();
    ProblemInstance p = testsupport::kitchen_problem(d);

    SearchConfig gbfs;
    gbfs.strategy = SearchStrategy::Gbfs;
    SolveResult res = solve(p, d, gbfs);
    REQUIRE(res.solved());
    CHECK(validate_plan(p, res.plan, d).valid);
    CHECK(res.plan.length() == 3);

    SearchConfig bfs;
    bfs.strategy = SearchStrategy::Bfs;
    SolveResult opt = solve(p, d, bfs);
    REQUIRE(opt.solved());
    CHECK(opt.plan.length() == 3);

    auto oracle = testsupport::iddfs_plan_length(p, d, 6);
    REQUIRE(oracle.has_value());
    CHECK(static_cast<int>(opt.plan.length()) == *oracle);
}

TEST_CASE("unsolvable and exhausted are distinct outcomes") {
    Domain d = testsupport::fig2_domain();
    ProblemInstance p = testsupport::fig3_problem(d);

    SUBCASE("relaxed-unreachable goal is unsolvable") {
        p.goal = {GroundAtom{"at", {"r1", "locb"}}};
        SolveResult res = solve(p, d, SearchConfig{});
        CHECK(res.status == SolveStatus::Unsolvable);
    }
    SUBCASE("expansion cap reports exhausted") {
        Domain kd = testsupport::kitchen_domain();
        ProblemInstance kp = testsupport::kitchen_problem(kd);
        SearchConfig cfg;
        cfg.strategy = SearchStrategy::Bfs;
        cfg.max_expansions = 1;
        SolveResult res = solve(kp, kd, cfg);
        CHECK(res.status == SolveStatus::Exhausted);
    }
    SUBCASE("exhaustive search without a goal is unsolvable") {
        Domain kd = testsupport::kitchen_domain();
        ProblemInstance kp = testsupport::kitchen_problem(kd);
        kp.goal = {GroundAtom{"placed", {"knife"}}, GroundAtom{"handempty", {"r1"}}};
        // placed(knife) needs slicing the knife while holding something;
        // handempty(r1) can never be restored: nothing re-adds it
        SolveResult res = solve(kp, kd, SearchConfig{});
        CHECK(res.status == SolveStatus::Unsolvable);
    }
}

TEST_CASE("solver runs are deterministic") {
    Domain d = testsupport::kitchen_domain();
    ProblemInstance p = testsupport::kitchen_problem(d);
    for (auto strategy : {SearchStrategy::Gbfs, SearchStrategy::Bfs}) {
        SearchConfig cfg;
        cfg.strategy = strategy;
        SolveResult a = solve(p, d, cfg);
        SolveResult b = solve(p, d, cfg);
        CHECK(a.plan == b.plan);
        CHECK(a.stats.expanded == b.stats.expanded);
        CHECK(a.stats.generated == b.stats.generated);
    }
}

TEST_CASE("gbfs plans validate and bfs matches the iddfs oracle on random instances") {
    std::mt19937 rng(31337);
    int solved = 0;
    for (int round = 0; round < 60 && solved < 25; ++round) {
        Domain d = testsupport::random_domain(rng);
        ProblemInstance p = testsupport::random_instance(d, rng);
        if (testsupport::reachable_state_count(p, d, 10000) >= 10000) continue;

        SearchConfig gbfs;
        gbfs.max_expansions = 50000;
        SolveResult g = solve(p, d, gbfs);
        if (g.status == SolveStatus::Exhausted) continue;

        SearchConfig bfs;
        bfs.strategy = SearchStrategy::Bfs;
        bfs.max_expansions = 200000;
        SolveResult b = solve(p, d, bfs);

        CHECK(g.solved() == b.solved());  // gbfs is complete on finite spaces
        if (!g.solved()) continue;
        ++solved;
        CHECK(validate_plan(p, g.plan, d).valid);
        CHECK(validate_plan(p, b.plan, d).valid);
        auto oracle = testsupport::iddfs_plan_length(p, d, static_cast<int>(b.plan.length()));
        REQUIRE(oracle.has_value());
        CHECK(static_cast<int>(b.plan.length()) == *oracle);
    }
    CHECK(solved >= 15);
}

TEST_CASE("h_add infinity implies bfs unsolvable") {
    std::mt19937 rng(2718);
    for (int round = 0; round < 30; ++round) {
        Domain d = testsupport::random_domain(rng);
        ProblemInstance p = testsupport::random_instance(d, rng);
        // swap in an arbitrary well-typed goal, reachable or not
        if (p.objects.empty() || d.predicates.empty()) continue;
        const auto& sig = d.predicates[rng() % d.predicates.size()];
        GroundAtom atom;
        atom.pred = sig.name;
        bool ok = true;
        for (const auto& want : sig.param_types) {
            std::vector<std::string> fits;
            for (const auto& [n, t] : p.objects)
                if (d.types.is_subtype(t, want)) fits.push_back(n);
            if (fits.empty()) {
                ok = false;
                break;
            }
            atom.args.push_back(fits[rng() % fits.size()]);
        }
        if (!ok) continue;
        p.goal = {atom};

        GroundTask task = ground_task(p, d);
        SearchConfig bfs;
        bfs.strategy = SearchStrategy::Bfs;
        bfs.max_expansions = 100000;
        SolveResult res = solve(p, d, bfs);
        if (h_add(task, task.init) == kCostInf) CHECK(res.status == SolveStatus::Unsolvable);
        if (res.solved()) CHECK(h_add(task, task.init) < kCostInf);
    }
}

TEST_CASE("compare_runs pairs stats and validates the filtered plan") {
    Domain d = testsupport::kitchen_domain();
    ProblemInstance p = testsupport::kitchen_problem(d);
    ActionGraph g = build_graph(d);

    SUBCASE("seeding everything gives identical ground-action counts") {
        std::vector<SeedAction> seeds;
        for (const auto& a : d.actions)
            seeds.push_back({a.name, std::vector<std::string>(a.arity(), "*")});
        ComparisonReport r = compare_runs(p, d, g, seeds, SearchConfig{});
        CHECK_FALSE(r.fell_back);
        CHECK(r.original.stats.ground_actions == r.filtered.stats.ground_actions);
        CHECK(r.filtered_plan_valid_on_original);
    }
    SUBCASE("rigged seeds that exclude the goal object fall back to the original") {
        Domain d2 = parse_domain(
            "(define (domain two) (:types robot item floor)"
            " (:predicates (held ?r - robot ?o - item) (free ?r - robot) (dusty ?f - floor)"
            "              (shiny ?f - floor))"
            " (:action grab :parameters (?r - robot ?o - item)"
            "  :precondition (and (free ?r)) :effect (and (held ?r ?o) (not (free ?r))))"
            " (:action buff :parameters (?f - floor)"
            "  :precondition (and (dusty ?f)) :effect (and (shiny ?f) (not (dusty ?f)))))");
        ProblemInstance p2 = parse_problem(
            "(define (problem two-t) (:domain two)"
            " (:objects r1 - robot cup - item f1 - floor)"
            " (:init (free r1) (dusty f1)) (:goal (and (held r1 cup))))",
            d2);
        ActionGraph g2 = build_graph(d2);
        ComparisonReport r = compare_runs(p2, d2, g2, {SeedAction{"buff", {"f1"}}}, SearchConfig{});
        CHECK(r.fell_back);
        CHECK(r.original.solved());
        CHECK(r.filtered.solved());
        CHECK(r.to_json()["fell_back"] == true);
    }
}
