#include <doctest.h>

#include "scaleplan/parser.hpp"
#include "scaleplan/writer.hpp"
#include "testsupport.hpp"

using namespace scaleplan;

TEST_CASE("fig2-style domain parses to the expected structure") {
    Domain d = testsupport::fig2_domain();
    CHECK(d.name == "simple-pick-place");
    CHECK(d.actions.size() == 1);
    CHECK(d.predicates.size() == 3);
    CHECK(d.types.contains("robot"));
    CHECK(d.types.contains("object"));
    CHECK(d.types.contains("location"));

    const ActionSchema& pick = d.actions[0];
    CHECK(pick.name == "pick");
    CHECK(pick.arity() == 3);
    CHECK(pick.preconditions.size() == 2);
    CHECK(pick.add_effects.size() == 1);
    CHECK(pick.del_effects.size() == 1);
    CHECK(pick.add_effects[0].pred == "holding");
    CHECK(pick.del_effects[0].pred == "at-obj");
}

TEST_CASE("empty domain") {
    Domain d = parse_domain("(define (domain d) (:requirements :strips))");
    CHECK(d.actions.empty());
    CHECK(d.predicates.empty());
}

TEST_CASE("negative precondition is rejected loudly") {
    std::string src = testsupport::read_file("pddl/simple_pick_place.pddl");
    auto pos = src.find(":precondition (and ");
    REQUIRE(pos != std::string::npos);
    src.insert(pos + std::string(":precondition (and ").size(), "(not (at ?r ?l)) ");
    CHECK_THROWS_AS(parse_domain(src), UnsupportedFeature);
}

TEST_CASE("requirements outside :strips :typing are rejected by name") {
    try {
        parse_domain("(define (domain d) (:requirements :strips :disjunctive-preconditions))");
        FAIL("expected UnsupportedFeature");
    } catch (const UnsupportedFeature& e) {
        CHECK(e.feature == ":disjunctive-preconditions");
    }
}

TEST_CASE("syntax errors carry a position") {
    try {
        parse_domain("(define (domain d)\n  (:predicates (p ?x - t)");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.pos.line >= 2);
    }
}

TEST_CASE("undeclared predicate and arity mistakes are type errors") {
    CHECK_THROWS_AS(parse_domain("(define (domain d) (:types t) (:action a"
                                 " :parameters (?x - t) :precondition (and (p ?x)) :effect (and)))"),
                    TypeCheckError);
    CHECK_THROWS_AS(parse_domain("(define (domain d) (:types t) (:predicates (p ?x - t))"
                                 " (:action a :parameters (?x - t) :precondition (and (p ?x ?x))"
                                 " :effect (and)))"),
                    TypeCheckError);
}

TEST_CASE("add/delete contradictions in one effect are rejected") {
    CHECK_THROWS_AS(parse_domain("(define (domain d) (:types t) (:predicates (p ?x - t))"
                                 " (:action a :parameters (?x - t) :precondition (and)"
                                 " :effect (and (p ?x) (not (p ?x)))))"),
                    TypeCheckError);
}

TEST_CASE("fig3-style problem parses fully ground and typed") {
    Domain d = testsupport::fig2_domain();
    ProblemInstance p = testsupport::fig3_problem(d);
    CHECK(p.name == "simple-task");
    CHECK(p.objects.size() == 4);
    CHECK(*p.object_type("r1") == "robot");
    CHECK(*p.object_type("obj1") == "object");
    CHECK(*p.object_type("loca") == "location");
    CHECK(*p.object_type("locb") == "location");
    REQUIRE(p.init.size() == 2);
    CHECK(p.init[0] == GroundAtom{"at", {"r1", "loca"}});
    CHECK(p.init[1] == GroundAtom{"at-obj", {"obj1", "loca"}});
    REQUIRE(p.goal.size() == 1);
    CHECK(p.goal[0] == GroundAtom{"holding", {"r1", "obj1"}});
    CHECK(p.display_of("loca") == "locA");
}

TEST_CASE("ill-typed init atom is rejected") {
    Domain d = testsupport::fig2_domain();
    CHECK_THROWS_AS(parse_problem("(define (problem empty) (:domain simple-pick-place)"
                                  " (:objects r1 - robot) (:init (at r1 r1)) (:goal (and)))",
                                  d),
                    TypeCheckError);
}

TEST_CASE("problem with empty goal is accepted") {
    Domain d = testsupport::fig2_domain();
    ProblemInstance p = parse_problem(
        "(define (problem empty) (:domain simple-pick-place)"
        " (:objects r1 - robot locA - location) (:init (at r1 locA)) (:goal (and)))",
        d);
    CHECK(p.goal.empty());
}

TEST_CASE("goal atom with wrong object type is a type error") {
    Domain d = testsupport::fig2_domain();
    std::string src = testsupport::read_file("pddl/simple_task.pddl");
    auto pos = src.find("(holding r1 obj1)");
    REQUIRE(pos != std::string::npos);
    src.replace(pos, std::string("(holding r1 obj1)").size(), "(holding locA obj1)");
    CHECK_THROWS_AS(parse_problem(src, d), TypeCheckError);
}

TEST_CASE("domain name mismatch") {
    Domain d = testsupport::fig2_domain();
    CHECK_THROWS_AS(
        parse_problem("(define (problem p) (:domain other) (:init) (:goal (and)))", d),
        DomainMismatch);
}

TEST_CASE("canonical serialization round-trips the golden corpus") {
    for (const char* file : {"pddl/simple_pick_place.pddl", "pddl/kitchen.pddl", "pddl/move_pick.pddl"}) {
        Domain d1 = parse_domain(testsupport::read_file(file));
        Domain d2 = parse_domain(serialize_domain(d1));
        CHECK(d1 == d2);
        // serialization is a fixpoint
        CHECK(serialize_domain(d1) == serialize_domain(d2));
    }
    Domain fig2 = testsupport::fig2_domain();
    for (const char* file : {"pddl/simple_task.pddl"}) {
        ProblemInstance p1 = parse_problem(testsupport::read_file(file), fig2);
        ProblemInstance p2 = parse_problem(serialize_problem(p1, fig2), fig2);
        CHECK(p1 == p2);
    }
    Domain kitchen = testsupport::kitchen_domain();
    ProblemInstance k1 = testsupport::kitchen_problem(kitchen);
    ProblemInstance k2 = parse_problem(serialize_problem(k1, kitchen), kitchen);
    CHECK(k1 == k2);
}

TEST_CASE("identifiers are case-insensitive with display casing preserved") {
    Domain d = parse_domain(
        "(define (domain CaseMix) (:requirements :strips :typing) (:types Thing)"
        " (:predicates (Seen ?x - Thing))"
        " (:action Look :parameters (?x - THING) :precondition (and) :effect (and (SEEN ?x))))");
    CHECK(d.name == "casemix");
    CHECK(d.find_action("look") != nullptr);
    CHECK(d.find_predicate("seen") != nullptr);
    CHECK(d.display_of("casemix") == "CaseMix");
    CHECK(d.display_of("look") == "Look");
    // round trip keeps structure
    CHECK(parse_domain(serialize_domain(d)) == d);
}

TEST_CASE("json mirror of domain and problem") {
    Domain d = testsupport::fig2_domain();
    ProblemInstance p = testsupport::fig3_problem(d);
    json dj = domain_to_json(d);
    CHECK(dj["name"] == "simple-pick-place");
    CHECK(dj["actions"].size() == 1);
    CHECK(dj["actions"][0]["preconditions"].size() == 2);
    json pj = problem_to_json(p);
    CHECK(pj["objects"]["obj1"] == "object");
    CHECK(pj["goal"][0]["pred"] == "holding");
}
