#include <doctest.h>

#include "replab/model.h"
#include "replab/parser.h"
#include "support.h"

using pddl::Metric;
using pddl::parse_domain;
using pddl::parse_problem;
using pddl::ParseError;
using pddl::SemanticError;

TEST_CASE("parser: switch domain structure") {
  pddl::Domain d = parse_domain(support::kSwitchDomain);
  CHECK(d.name == "switches");
  REQUIRE(d.predicates.size() == 2);
  CHECK(d.predicates[0].name == "on");
  CHECK(d.predicates[0].params.size() == 1);
  CHECK(d.predicates[0].params[0].type == "switch");
  REQUIRE(d.actions.size() == 2);
  const auto& a = d.actions[0];
  CHECK(a.name == "flip-on");
  REQUIRE(a.precond.size() == 1);
  CHECK(a.precond[0].pred == "off");
  REQUIRE(a.add.size() == 1);
  CHECK(a.add[0].pred == "on");
  REQUIRE(a.del.size() == 1);
  CHECK(a.del[0].pred == "off");
  CHECK(d.types.is_subtype("switch", "object"));
}

TEST_CASE("parser: type hierarchy with intermediate types") {
  pddl::Domain d = parse_domain(R"(
    (define (domain h)
      (:requirements :strips :typing)
      (:types vehicle - object car bike - vehicle)
      (:predicates (parked ?v - vehicle))
      (:action park :parameters (?c - car)
        :precondition (and) :effect (and (parked ?c)))))");
  CHECK(d.types.is_subtype("car", "vehicle"));
  CHECK(d.types.is_subtype("car", "object"));
  CHECK(d.types.is_subtype("bike", "vehicle"));
  CHECK(!d.types.is_subtype("vehicle", "car"));
  CHECK(!d.types.is_subtype("car", "bike"));
}

TEST_CASE("parser: identifiers fold to lower case") {
  pddl::Domain d = parse_domain(R"(
    (define (domain CaseTest)
      (:requirements :strips :typing)
      (:predicates (Flag ?x - Object))
      (:action Raise :parameters (?x - OBJECT)
        :precondition (and) :effect (and (flag ?x)))))");
  CHECK(d.name == "casetest");
  CHECK(d.predicates[0].name == "flag");
  CHECK(d.actions[0].name == "raise");
}

TEST_CASE("parser: domain error cases") {
  // duplicate predicate
  CHECK_THROWS_AS(parse_domain(R"(
    (define (domain e) (:requirements :strips)
      (:predicates (p ?x) (p ?y))))"),
                  SemanticError);
  // unknown type in a parameter
  CHECK_THROWS_AS(parse_domain(R"(
    (define (domain e) (:requirements :strips :typing)
      (:predicates (p ?x - ghost))))"),
                  SemanticError);
  // arity mismatch inside an action body
  CHECK_THROWS_AS(parse_domain(R"(
    (define (domain e) (:requirements :strips)
      (:predicates (p ?x))
      (:action a :parameters (?x ?y)
        :precondition (and) :effect (and (p ?x ?y)))))"),
                  SemanticError);
  // same literal added and deleted
  CHECK_THROWS_AS(parse_domain(R"(
    (define (domain e) (:requirements :strips)
      (:predicates (p ?x))
      (:action a :parameters (?x)
        :precondition (and) :effect (and (p ?x) (not (p ?x))))))"),
                  SemanticError);
  // effect over a non-parameter variable
  CHECK_THROWS_AS(parse_domain(R"(
    (define (domain e) (:requirements :strips)
      (:predicates (p ?x))
      (:action a :parameters (?x)
        :precondition (and) :effect (and (p ?z)))))"),
                  SemanticError);
  // unsupported requirement
  CHECK_THROWS_AS(parse_domain(R"(
    (define (domain e) (:requirements :adl)
      (:predicates (p ?x))))"),
                  SemanticError);
  // malformed s-expression
  CHECK_THROWS_AS(parse_domain("(define (domain"), ParseError);
}

static const char* kPrefProblem = R"(
(define (problem twosw)
  (:domain switches)
  (:objects s1 s2 s3 - switch)
  (:init (off s1) (off s2) (off s3))
  (:goal (and (on s1)
              (preference want2 (on s2))
              (preference want3 (on s3))))
  (:metric minimize (+ (is-violated want2) (is-violated want3))))
)";

TEST_CASE("parser: problem with preferences, unit penalties") {
  pddl::Problem p = parse_problem(kPrefProblem, support::switch_domain());
  CHECK(p.name == "twosw");
  CHECK(p.objects.size() == 3);
  CHECK(p.init.size() == 3);
  REQUIRE(p.hard_goals.size() == 1);
  CHECK(p.hard_goals[0] == pddl::GroundAtom{"on", {"s1"}});
  REQUIRE(p.soft_goals.size() == 2);
  // An unweighted sum of is-violated terms means every penalty is 1.
  CHECK(p.soft_goals[0].penalty == doctest::Approx(1.0));
  CHECK(p.soft_goals[1].penalty == doctest::Approx(1.0));
  CHECK(p.soft_goals[0].name == "want2");
  CHECK(p.metric.kind == Metric::Kind::PenaltySum);
}

TEST_CASE("parser: weighted preference terms") {
  pddl::Problem p = parse_problem(R"(
    (define (problem w) (:domain switches)
      (:objects s1 s2 - switch)
      (:init (off s1) (off s2))
      (:goal (and (preference a (on s1)) (preference b (on s2))))
      (:metric minimize (+ (* 3 (is-violated a)) (is-violated b)))))",
                                  support::switch_domain());
  REQUIRE(p.soft_goals.size() == 2);
  CHECK(p.soft_goals[0].penalty == doctest::Approx(3.0));
  CHECK(p.soft_goals[1].penalty == doctest::Approx(1.0));
}

TEST_CASE("parser: weighted sum of length and penalties") {
  pddl::Problem p = parse_problem(R"(
    (define (problem w) (:domain switches)
      (:objects s1 - switch)
      (:init (off s1))
      (:goal (and (preference a (on s1))))
      (:metric minimize (+ (* 0.5 (total-time)) (* 2 (is-violated a))))))",
                                  support::switch_domain());
  CHECK(p.metric.kind == Metric::Kind::WeightedSum);
  CHECK(p.metric.length_weight == doctest::Approx(0.5));
  CHECK(p.soft_goals[0].penalty == doctest::Approx(2.0));
}

TEST_CASE("parser: metric defaults") {
  // No metric clause but preferences: penalties default to 1.
  pddl::Problem a = parse_problem(R"(
    (define (problem d) (:domain switches)
      (:objects s1 - switch) (:init (off s1))
      (:goal (and (preference p1 (on s1))))))",
                                  support::switch_domain());
  CHECK(a.metric.kind == Metric::Kind::PenaltySum);
  CHECK(a.soft_goals[0].penalty == doctest::Approx(1.0));

  // No metric, no preferences: plain plan length.
  pddl::Problem b = parse_problem(R"(
    (define (problem d) (:domain switches)
      (:objects s1 - switch) (:init (off s1))
      (:goal (and (on s1)))))",
                                  support::switch_domain());
  CHECK(b.metric.kind == Metric::Kind::PlanLength);

  // Preference not mentioned in the metric: penalty 0.
  pddl::Problem c = parse_problem(R"(
    (define (problem d) (:domain switches)
      (:objects s1 s2 - switch) (:init (off s1) (off s2))
      (:goal (and (preference p1 (on s1)) (preference p2 (on s2))))
      (:metric minimize (is-violated p1))))",
                                  support::switch_domain());
  CHECK(c.soft_goals[0].penalty == doctest::Approx(1.0));
  CHECK(c.soft_goals[1].penalty == doctest::Approx(0.0));
}

TEST_CASE("parser: problem error cases") {
  auto dom = support::switch_domain();
  // domain name mismatch
  CHECK_THROWS_AS(parse_problem(R"(
    (define (problem e) (:domain elsewhere)
      (:objects s1 - switch) (:init) (:goal (and))))",
                                dom),
                  SemanticError);
  // undeclared object in init
  CHECK_THROWS_AS(parse_problem(R"(
    (define (problem e) (:domain switches)
      (:objects s1 - switch) (:init (off s9)) (:goal (and))))",
                                dom),
                  SemanticError);
  // arity mismatch in an init atom
  CHECK_THROWS_AS(parse_problem(R"(
    (define (problem e) (:domain travel)
      (:objects x - place) (:init (at x x)) (:goal (and))))",
                                support::travel_domain()),
                  SemanticError);
  // object of the wrong type in an atom
  auto hier = std::make_shared<const pddl::Domain>(parse_domain(R"(
    (define (domain h) (:requirements :strips :typing)
      (:types vehicle - object car - vehicle)
      (:predicates (parked ?v - vehicle))))"));
  CHECK_THROWS_AS(parse_problem(R"(
    (define (problem e) (:domain h)
      (:objects rock - object) (:init (parked rock)) (:goal (and))))",
                                hier),
                  SemanticError);
  CHECK_NOTHROW(parse_problem(R"(
    (define (problem okp) (:domain h)
      (:objects c - car) (:init (parked c)) (:goal (and))))",
                              hier));
  // metric references an unknown preference
  CHECK_THROWS_AS(parse_problem(R"(
    (define (problem e) (:domain switches)
      (:objects s1 - switch) (:init (off s1))
      (:goal (and (preference a (on s1))))
      (:metric minimize (is-violated ghost))))",
                                dom),
                  SemanticError);
  // duplicate preference names
  CHECK_THROWS_AS(parse_problem(R"(
    (define (problem e) (:domain switches)
      (:objects s1 s2 - switch) (:init (off s1) (off s2))
      (:goal (and (preference a (on s1)) (preference a (on s2))))))",
                                dom),
                  SemanticError);
  // negative penalty
  CHECK_THROWS_AS(parse_problem(R"(
    (define (problem e) (:domain switches)
      (:objects s1 - switch) (:init (off s1))
      (:goal (and (preference a (on s1))))
      (:metric minimize (* -1 (is-violated a)))))",
                                dom),
                  SemanticError);
  // duplicate metric term
  CHECK_THROWS_AS(parse_problem(R"(
    (define (problem e) (:domain switches)
      (:objects s1 - switch) (:init (off s1))
      (:goal (and (preference a (on s1))))
      (:metric minimize (+ (is-violated a) (is-violated a)))))",
                                dom),
                  SemanticError);
}

TEST_CASE("parser: plan steps and state files") {
  auto steps = pddl::parse_plan_steps("(go p1 p2)\n; hop\n(go p2 p3)\n");
  REQUIRE(steps.size() == 2);
  CHECK(steps[0].name == "go");
  CHECK(steps[0].args == std::vector<std::string>{"p1", "p2"});

  pddl::Problem line = support::line_problem(3);
  pddl::State s = pddl::parse_state("(at p2)\n(adj p1 p2)\n", line);
  CHECK(s.size() == 2);
  CHECK(s.contains({"at", {"p2"}}));
  CHECK_THROWS_AS(pddl::parse_state("(at nowhere)", line), SemanticError);
  CHECK_THROWS_AS(pddl::parse_state("(ghost p1)", line), SemanticError);
}
