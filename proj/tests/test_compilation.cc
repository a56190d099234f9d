#include <doctest.h>

#include "replab/compilation.h"
#include "replab/ground_task.h"
#include "replab/parser.h"
#include "replab/solver.h"
#include "replab/warehouses.h"
#include "replab/writer.h"
#include "support.h"

using psp::build_constraints;
using psp::compile;
using psp::CompileOptions;
using psp::ConstraintSet;
using psp::ReplanModel;

namespace {

// p1 - p2 - p4 and p1 - p3 - p4: two routes to the goal.
pddl::Problem diamond_problem() {
  pddl::Problem p;
  p.domain = support::travel_domain();
  p.name = "diamond";
  for (const char* o : {"p1", "p2", "p3", "p4"})
    p.objects.push_back({o, "place"});
  p.init.add({"at", {"p1"}});
  for (auto [a, b] : std::vector<std::pair<std::string, std::string>>{
           {"p1", "p2"}, {"p2", "p4"}, {"p1", "p3"}, {"p3", "p4"}}) {
    p.init.add({"adj", {a, b}});
    p.init.add({"adj", {b, a}});
  }
  p.hard_goals.push_back({"at", {"p4"}});
  return p;
}

plans::Plan route_a(const pddl::Problem& p) {
  return {pddl::resolve_step(p, "go", {"p1", "p2"}),
          pddl::resolve_step(p, "go", {"p2", "p4"})};
}

bool is_marker(const std::string& pred) {
  auto ends_with = [&](const char* suffix) {
    std::string s(suffix);
    return pred.size() >= s.size() &&
           pred.compare(pred.size() - s.size(), s.size(), s) == 0;
  };
  return ends_with("-executed") || ends_with("-achieved");
}

}  // namespace

TEST_CASE("compile: action similarity adds marker predicate and copy") {
  pddl::Problem d = diamond_problem();
  auto cs = build_constraints(ReplanModel::M2_Similarity, d, route_a(d), 0, {});
  auto cp = compile(d, cs);

  const pddl::Domain& dom = *cp.problem.domain;
  REQUIRE(dom.find_predicate("go-executed") != nullptr);
  CHECK(dom.find_predicate("go-executed")->params.size() == 2);
  REQUIRE(dom.find_action("go") != nullptr);          // original kept
  REQUIRE(dom.find_action("go-tracked") != nullptr);  // instrumented copy

  const auto& tracked = *dom.find_action("go-tracked");
  bool marks = false;
  for (const auto& add : tracked.add)
    if (add.pred == "go-executed" &&
        add.args == std::vector<std::string>{"?from", "?to"})
      marks = true;
  CHECK(marks);
  // The original is untouched.
  for (const auto& add : dom.find_action("go")->add)
    CHECK(add.pred != "go-executed");

  REQUIRE(cp.problem.soft_goals.size() == 2);
  CHECK(cp.problem.soft_goals[0].atom ==
        pddl::GroundAtom{"go-executed", {"p1", "p2"}});
  CHECK(cp.problem.soft_goals[0].name == "sim-0");
  CHECK(cp.problem.metric.kind == pddl::Metric::Kind::PenaltySum);
  CHECK(cp.problem.hard_goals == d.hard_goals);
  CHECK(cp.action_origin.at("go-tracked") == "go");
}

TEST_CASE("compile: replace_originals folds instrumentation in place") {
  pddl::Problem d = diamond_problem();
  auto cs = build_constraints(ReplanModel::M2_Similarity, d, route_a(d), 0, {});
  CompileOptions opts;
  opts.replace_originals = true;
  auto cp = compile(d, cs, opts);

  const pddl::Domain& dom = *cp.problem.domain;
  CHECK(dom.actions.size() == d.domain->actions.size());
  CHECK(dom.find_action("go-tracked") == nullptr);
  bool marks = false;
  for (const auto& add : dom.find_action("go")->add)
    if (add.pred == "go-executed") marks = true;
  CHECK(marks);
  CHECK(cp.action_origin.at("go") == "go");
}

TEST_CASE("compile: empty constraint set is the identity") {
  pddl::Problem d = diamond_problem();
  ConstraintSet cs;  // Empty
  auto cp = compile(d, cs);
  CHECK(cp.problem.domain == d.domain);  // same shared schema object
  CHECK(pddl::equivalent(cp.problem, d));
  CHECK(cp.action_origin.empty());
  CHECK(psp::strip_instrumentation(cp, route_a(d)) == route_a(d));
}

TEST_CASE("compile: marker name collisions are rejected") {
  auto dom = std::make_shared<const pddl::Domain>(pddl::parse_domain(R"(
    (define (domain clash)
      (:requirements :strips :typing)
      (:types place - object)
      (:predicates (at ?p - place) (adj ?a - place ?b - place)
                   (go-executed ?a - place ?b - place))
      (:action go :parameters (?from - place ?to - place)
        :precondition (and (at ?from) (adj ?from ?to))
        :effect (and (at ?to) (not (at ?from))))))"));
  pddl::Problem p;
  p.domain = dom;
  p.name = "clashp";
  p.objects = {{"p1", "place"}, {"p2", "place"}};
  p.init.add({"at", {"p1"}});
  p.init.add({"adj", {"p1", "p2"}});
  plans::Plan plan{pddl::resolve_step(p, "go", {"p1", "p2"})};
  auto cs = build_constraints(ReplanModel::M2_Similarity, p, plan, 0, {});
  CHECK_THROWS_AS(compile(p, cs), pddl::SemanticError);
}

TEST_CASE("compile: unknown action or wrong kind") {
  pddl::Problem d = diamond_problem();
  ConstraintSet bogus;
  bogus.kind = ConstraintSet::Kind::ActionSimilarity;
  bogus.similarity.push_back({"teleport", {"p1"}, 1.0});
  CHECK_THROWS_AS(compile(d, bogus), pddl::SemanticError);

  ConstraintSet empty;  // kind Empty
  CHECK_THROWS_AS(psp::compile_action_similarity(d, empty),
                  pddl::SemanticError);
  CHECK_THROWS_AS(psp::compile_commitments(d, empty), pddl::SemanticError);
}

TEST_CASE("compile: commitments add achieved markers and pre-marking") {
  pddl::Problem line = support::line_problem(4);
  plans::Plan plan{pddl::resolve_step(line, "go", {"p1", "p2"}),
                   pddl::resolve_step(line, "go", {"p2", "p3"}),
                   pddl::resolve_step(line, "go", {"p3", "p4"})};
  auto cs = build_constraints(ReplanModel::M3_Commitment, line, plan, 1,
                              {"visited"});
  REQUIRE(cs.commitments.size() == 3);  // visited p2, p3, p4

  // Perturbed state: the walker was thrown back to p1, but visited(p2)
  // survives from the executed prefix.
  pddl::State ip = line.init;
  ip.add({"visited", {"p2"}});
  pddl::Problem perturbed = pddl::with_init(line, ip);

  auto cp = compile(perturbed, cs);
  const pddl::Domain& dom = *cp.problem.domain;
  REQUIRE(dom.find_predicate("visited-achieved") != nullptr);
  REQUIRE(dom.find_action("go-tracked") != nullptr);
  // Only the constrained predicate gets a marker effect; at() does not.
  int marker_effects = 0;
  for (const auto& add : dom.find_action("go-tracked")->add)
    if (is_marker(add.pred)) {
      ++marker_effects;
      CHECK(add.pred == "visited-achieved");
      CHECK(add.args == std::vector<std::string>{"?to"});
    }
  CHECK(marker_effects == 1);

  CHECK(cp.problem.init.contains({"visited-achieved", {"p2"}}));
  CHECK(!cp.problem.init.contains({"visited-achieved", {"p3"}}));
  CHECK(!cp.problem.init.contains({"visited-achieved", {"p4"}}));
  REQUIRE(cp.problem.soft_goals.size() == 3);
  CHECK(cp.problem.soft_goals[0].name == "com-0");
}

TEST_CASE("compile: commitment over a predicate the domain lacks") {
  pddl::Problem d = diamond_problem();
  ConstraintSet cs;
  cs.kind = ConstraintSet::Kind::Commitments;
  cs.commitments.push_back({{"ghost", {"p1"}}, 1.0});
  CHECK_THROWS_AS(compile(d, cs), pddl::SemanticError);
}

TEST_CASE("compile: solving the compiled problem favors reuse") {
  pddl::Problem d = diamond_problem();
  plans::Plan old_plan = route_a(d);
  auto cs = build_constraints(ReplanModel::M2_Similarity, d, old_plan, 0, {});
  CompileOptions opts;
  opts.replace_originals = true;

  // Perturbation: the walker finds itself at p3. The penalty-free route
  // back through p1 and p2 (3 steps, objective 0.03) beats the short route
  // p3 -> p4 (1 step but 2 lost actions, objective 2.01).
  pddl::State ip;
  ip.add({"at", {"p3"}});
  for (const auto& a : d.init.atoms())
    if (a.pred == "adj") ip.add(a);
  auto cp = compile(pddl::with_init(d, ip), cs, opts);

  search::PlannerConfig cfg;
  cfg.time_budget_s = 10.0;
  cfg.soft_mode = search::SoftGoalMode::Pessimistic;
  auto res = search::solve(cp.problem, cfg);
  REQUIRE(res.plan.has_value());
  CHECK(res.penalty_sum == doctest::Approx(0.0));
  CHECK(res.plan_length == 3);

  plans::Plan stripped = psp::strip_instrumentation(cp, *res.plan);
  auto diff = plans::plan_diff(old_plan, stripped);
  CHECK(diff.set_diff == 0);  // penalty and set_diff agree
  auto v = plans::validate(cp.base, stripped);
  CHECK(v.valid());
}

TEST_CASE("compile: soundness both directions on warehouse instances") {
  for (std::uint64_t seed : {31, 32}) {
    auto spec = wh::InstanceSpec::for_packages(1, seed);
    pddl::Problem prob = wh::generate_instance(spec);
    search::PlannerConfig first;
    first.anytime = false;
    first.time_budget_s = 30.0;
    auto base_res = search::solve(prob, first);
    REQUIRE(base_res.plan.has_value());

    for (auto model : {ReplanModel::M2_Similarity, ReplanModel::M3_Commitment}) {
      auto cs = build_constraints(model, prob, *base_res.plan, 1,
                                  wh::commitment_predicates());
      auto cp = compile(prob, cs);  // originals kept

      // Forward: a compiled-problem plan strips to a valid base plan.
      auto res = search::solve(cp.problem, first);
      REQUIRE(res.plan.has_value());
      plans::Plan stripped = psp::strip_instrumentation(cp, *res.plan);
      CHECK(plans::validate(cp.base, stripped).valid());

      // Converse: a base plan is verbatim a compiled-problem plan with the
      // same hard-goal satisfaction (originals are still present).
      CHECK(plans::validate(cp.problem, *base_res.plan).valid());
    }
  }
}

TEST_CASE("compile: markers are monotone along any trajectory") {
  pddl::Problem d = diamond_problem();
  auto cs = build_constraints(ReplanModel::M2_Similarity, d, route_a(d), 0, {});
  auto cp_sim = compile(d, cs);

  pddl::Problem line = support::line_problem(4);
  plans::Plan lp{pddl::resolve_step(line, "go", {"p1", "p2"}),
                 pddl::resolve_step(line, "go", {"p2", "p3"}),
                 pddl::resolve_step(line, "go", {"p3", "p4"})};
  auto cs3 = build_constraints(ReplanModel::M3_Commitment, line, lp, 0,
                               {"visited", "at"});
  auto cp_com = compile(line, cs3);

  util::Rng rng(5);
  for (const auto& cp : {cp_sim, cp_com}) {
    for (int rep = 0; rep < 10; ++rep) {
      plans::Plan walk = support::random_walk(cp.problem, rng, 8);
      auto trace = plans::simulate(cp.problem.init, walk);
      for (std::size_t i = 0; i + 1 < trace.size(); ++i)
        for (const auto& atom : trace[i].atoms())
          if (is_marker(atom.pred)) CHECK(trace[i + 1].contains(atom));
    }
  }
}

TEST_CASE("compile: penalty agreement planner vs validate vs hand count") {
  pddl::Problem d = diamond_problem();
  plans::Plan old_plan = route_a(d);
  util::Rng rng(17);

  for (auto model : {ReplanModel::M2_Similarity, ReplanModel::M3_Commitment}) {
    for (bool replace : {false, true}) {
      auto cs = build_constraints(model, d, old_plan, 0, {"visited"});
      CompileOptions opts;
      opts.replace_originals = replace;
      auto cp = compile(d, cs, opts);
      auto task = search::GroundTask::build(cp.problem);

      for (int rep = 0; rep < 10; ++rep) {
        plans::Plan walk = support::random_walk(cp.problem, rng, 6);
        auto trace = plans::simulate(cp.problem.init, walk);

        double planner_pen = task.end_penalty(task.state_bits(trace.back()));
        double validate_pen = plans::validate(cp.problem, walk).penalty_sum;

        // Hand count: a constraint is honored iff an instrumented step
        // re-enacted it (or, for commitments, the state already had it).
        double hand = 0;
        if (model == ReplanModel::M2_Similarity) {
          for (const auto& c : cs.similarity) {
            bool honored = false;
            for (const auto& stp : walk) {
              auto it = cp.action_origin.find(stp.name);
              if (it != cp.action_origin.end() && it->second == c.action &&
                  stp.args == c.args)
                honored = true;
            }
            if (!honored) hand += c.penalty;
          }
        } else {
          for (const auto& c : cs.commitments) {
            bool honored = cp.base.init.contains(c.atom);
            for (const auto& stp : walk) {
              auto it = cp.action_origin.find(stp.name);
              if (it == cp.action_origin.end()) continue;
              auto orig = pddl::resolve_step(cp.base, it->second, stp.args);
              for (const auto& add : orig.add)
                if (add == c.atom) honored = true;
            }
            if (!honored) hand += c.penalty;
          }
        }
        CHECK(planner_pen == doctest::Approx(validate_pen));
        CHECK(validate_pen == doctest::Approx(hand));
      }
    }
  }
}

TEST_CASE("compile: to_preferences round trips through PDDL3 text") {
  pddl::Problem line = support::line_problem(4);
  plans::Plan lp{pddl::resolve_step(line, "go", {"p1", "p2"}),
                 pddl::resolve_step(line, "go", {"p2", "p3"}),
                 pddl::resolve_step(line, "go", {"p3", "p4"})};
  for (auto model : {ReplanModel::M2_Similarity, ReplanModel::M3_Commitment}) {
    auto cs = build_constraints(model, line, lp, 0, {"visited"});
    auto cp = compile(line, cs);
    pddl::Problem pref = psp::to_preferences(cp);
    for (const auto& g : pref.soft_goals) CHECK(!g.name.empty());

    std::string dom_text =
        pddl::emit_domain(*pref.domain, pddl::ProblemDialect::Pddl3);
    std::string prob_text = pddl::emit_problem(pref);
    auto dom2 = std::make_shared<const pddl::Domain>(
        pddl::parse_domain(dom_text));
    pddl::Problem back = pddl::parse_problem(prob_text, dom2);
    CHECK(pddl::equivalent(*pref.domain, *dom2));
    CHECK(pddl::equivalent(pref, back));
  }
}
