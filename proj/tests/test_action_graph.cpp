#include <doctest.h>

#include "scaleplan/action_graph.hpp"
#include "scaleplan/parser.hpp"
#include "testsupport.hpp"
#include "testsupport_random.hpp"

using namespace scaleplan;

namespace {

Literal lit(const std::string& pred, std::vector<Term> args) { return Literal{pred, std::move(args)}; }

}  // namespace

TEST_CASE("covers matches predicate name and unifiable types positionwise") {
    TypeHierarchy types;
    types.add("robot");
    types.add("object");
    types.add("location");

    Literal eff = lit("holding", {{"?r", "robot"}, {"?o", "object"}});
    Literal pre = lit("holding", {{"?a", "robot"}, {"?b", "object"}});
    CHECK(covers(eff, pre, types));

    Literal at_eff = lit("at", {{"?r", "robot"}, {"?l", "location"}});
    Literal atobj_pre = lit("at-obj", {{"?o", "object"}, {"?l", "location"}});
    CHECK_FALSE(covers(at_eff, atobj_pre, types));

    // same name used at two different arities signals a corrupt domain
    Literal unary = lit("holding", {{"?r", "robot"}});
    CHECK_THROWS_AS(covers(eff, unary, types), ArityMismatch);
}

TEST_CASE("covers honors the hierarchy in both directions") {
    TypeHierarchy types;
    types.add("vehicle");
    types.add("truck", "vehicle");

    CHECK(covers(lit("p", {{"?x", "vehicle"}}), lit("p", {{"?y", "truck"}}), types));
    CHECK(covers(lit("p", {{"?x", "truck"}}), lit("p", {{"?y", "vehicle"}}), types));

    types.add("boat", "vehicle");
    CHECK_FALSE(covers(lit("p", {{"?x", "truck"}}), lit("p", {{"?y", "boat"}}), types));
}

TEST_CASE("single-action domain has no edges") {
    ActionGraph g = build_graph(testsupport::fig2_domain());
    CHECK(g.nodes.size() == 1);
    CHECK(g.edges.empty());
}

TEST_CASE("kitchen chain produces the two strict edges") {
    ActionGraph g = build_graph(testsupport::kitchen_domain());
    CHECK(g.nodes.size() == 3);
    CHECK(g.count(EdgeKind::Strict) == 2);
    CHECK(g.count(EdgeKind::Relaxed) == 0);
    CHECK(g.has_edge("pickup", "slice"));
    CHECK(g.has_edge("slice", "place"));
}

TEST_CASE("partial overlap without strict support becomes a relaxed edge") {
    Domain d = parse_domain(testsupport::read_file("pddl/move_pick.pddl"));
    ActionGraph g = build_graph(d);
    // move re-achieves its own precondition: a strict self-loop
    auto find = [&](const std::string& f, const std::string& t) -> const GraphEdge* {
        for (const auto& e : g.edges)
            if (e.from == f && e.to == t) return &e;
        return nullptr;
    };
    REQUIRE(find("move", "move") != nullptr);
    CHECK(find("move", "move")->kind == EdgeKind::Strict);
    REQUIRE(find("move", "pick") != nullptr);
    CHECK(find("move", "pick")->kind == EdgeKind::Relaxed);
    CHECK(find("pick", "move") == nullptr);
    CHECK(g.edges.size() == 2);
}

TEST_CASE("graph construction is deterministic") {
    Domain d = testsupport::kitchen_domain();
    ActionGraph g1 = build_graph(d);
    ActionGraph g2 = build_graph(d);
    CHECK(g1.nodes == g2.nodes);
    CHECK(g1.edges == g2.edges);
}

TEST_CASE("edge rules match the brute-force oracle on random domains") {
    std::mt19937 rng(20240817);
    for (int i = 0; i < 60; ++i) {
        Domain d = testsupport::random_domain(rng);
        ActionGraph g = build_graph(d);
        auto expect = testsupport::oracle_edges(d);
        CHECK(g.edges == expect);
    }
}

TEST_CASE("backward reachability over the kitchen chain") {
    ActionGraph g = build_graph(testsupport::kitchen_domain());
    ReachableSet r = backward_reachable(g, {"place"});
    CHECK(r.members == std::vector<std::string>{"pickup", "place", "slice"});
    CHECK(r.terminals == std::vector<std::string>{"place"});
    for (const auto& e : r.witness_edges) CHECK(r.contains(e.to));
}

TEST_CASE("terminals covering every node reach every node") {
    ActionGraph g = build_graph(testsupport::kitchen_domain());
    ReachableSet r = backward_reachable(g, g.nodes);
    CHECK(r.members == g.nodes);
}

TEST_CASE("cycles terminate") {
    ActionGraph g;
    g.nodes = {"a", "b"};
    g.edges = {{"a", "b", EdgeKind::Strict}, {"b", "a", EdgeKind::Strict}};
    ReachableSet r = backward_reachable(g, {"a"});
    CHECK(r.members == std::vector<std::string>{"a", "b"});
}

TEST_CASE("unknown terminal is rejected by name") {
    ActionGraph g = build_graph(testsupport::kitchen_domain());
    try {
        backward_reachable(g, {"fly"});
        FAIL("expected UnknownTerminal");
    } catch (const UnknownTerminal& e) {
        CHECK(e.name == "fly");
    }
}

TEST_CASE("backward reachability equals the worklist fixpoint and is monotone") {
    std::mt19937 rng(99);
    for (int i = 0; i < 40; ++i) {
        Domain d = testsupport::random_domain(rng);
        ActionGraph g = build_graph(d);
        if (g.nodes.empty()) continue;

        std::vector<std::string> t1 = {g.nodes[rng() % g.nodes.size()]};
        std::vector<std::string> t2 = t1;
        t2.push_back(g.nodes[rng() % g.nodes.size()]);

        ReachableSet r1 = backward_reachable(g, t1);
        ReachableSet r2 = backward_reachable(g, t2);

        auto w1 = testsupport::worklist_reachable(g, t1);
        CHECK(std::set<std::string>(r1.members.begin(), r1.members.end()) == w1);

        for (const auto& m : r1.members) CHECK(r2.contains(m));
    }
}

TEST_CASE("dot export") {
    SUBCASE("empty graph") { CHECK(to_dot(ActionGraph{}) == "digraph actions { }\n"); }
    SUBCASE("one strict edge") {
        ActionGraph g;
        g.nodes = {"a", "b"};
        g.edges = {{"a", "b", EdgeKind::Strict}};
        CHECK(to_dot(g).find("\"a\" -> \"b\" [style=solid];") != std::string::npos);
    }
    SUBCASE("kitchen golden output") {
        ActionGraph g = build_graph(testsupport::kitchen_domain());
        CHECK(to_dot(g) ==
              "digraph actions {\n"
              "  \"pickup\";\n"
              "  \"place\";\n"
              "  \"slice\";\n"
              "  \"pickup\" -> \"slice\" [style=solid];\n"
              "  \"slice\" -> \"place\" [style=solid];\n"
              "}\n");
    }
}

TEST_CASE("json export tags edges with their kind") {
    ActionGraph g = build_graph(testsupport::kitchen_domain());
    auto j = graph_to_json(g);
    CHECK(j["nodes"].size() == 3);
    CHECK(j["edges"][0]["kind"] == "strict");
}
