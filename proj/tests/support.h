#pragma once

// Shared fixtures and independent oracle implementations for the test
// suites. The oracles deliberately avoid the library's own code paths:
// grounding is re-done by plain typed-tuple recursion, simulation by
// std::set arithmetic, so agreement is meaningful.

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "replab/grounding.h"
#include "replab/model.h"
#include "replab/parser.h"
#include "replab/plan_model.h"
#include "replab/rng.h"

namespace support {

// --- fixture domains -------------------------------------------------

inline const char* kSwitchDomain = R"(
(define (domain switches)
  (:requirements :strips :typing)
  (:types switch - object)
  (:predicates (on ?s - switch) (off ?s - switch))
  (:action flip-on
    :parameters (?s - switch)
    :precondition (and (off ?s))
    :effect (and (on ?s) (not (off ?s))))
  (:action flip-off
    :parameters (?s - switch)
    :precondition (and (on ?s))
    :effect (and (off ?s) (not (on ?s)))))
)";

inline const char* kTravelDomain = R"(
(define (domain travel)
  (:requirements :strips :typing)
  (:types place - object)
  (:predicates (at ?p - place) (adj ?a - place ?b - place)
               (visited ?p - place))
  (:action go
    :parameters (?from - place ?to - place)
    :precondition (and (at ?from) (adj ?from ?to))
    :effect (and (at ?to) (visited ?to) (not (at ?from)))))
)";

inline pddl::DomainRef switch_domain() {
  static pddl::DomainRef dom = std::make_shared<const pddl::Domain>(
      pddl::parse_domain(kSwitchDomain));
  return dom;
}

inline pddl::DomainRef travel_domain() {
  static pddl::DomainRef dom = std::make_shared<const pddl::Domain>(
      pddl::parse_domain(kTravelDomain));
  return dom;
}

// n switches, all initially off. `hard_on` / `soft_on` select switches by
// index (0-based); soft goals get the paired penalty.
inline pddl::Problem switch_problem(
    int n, const std::vector<int>& hard_on = {},
    const std::vector<std::pair<int, double>>& soft_on = {}) {
  pddl::Problem p;
  p.domain = switch_domain();
  p.name = "switches-" + std::to_string(n);
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) {
    names.push_back("s" + std::to_string(i + 1));
    p.objects.push_back({names.back(), "switch"});
    p.init.add({"off", {names.back()}});
  }
  for (int i : hard_on) p.hard_goals.push_back({"on", {names[i]}});
  std::sort(p.hard_goals.begin(), p.hard_goals.end());
  int k = 0;
  for (auto [i, pen] : soft_on)
    p.soft_goals.push_back(
        {{"on", {names[i]}}, pen, "want-" + std::to_string(++k)});
  p.metric.kind = p.soft_goals.empty() ? pddl::Metric::Kind::PlanLength
                                       : pddl::Metric::Kind::PenaltySum;
  return p;
}

// Line graph p1 - p2 - ... - pn, start at p1, hard goal at pn. Optimal plan
// length is n - 1 by construction.
inline pddl::Problem line_problem(int n) {
  pddl::Problem p;
  p.domain = travel_domain();
  p.name = "line-" + std::to_string(n);
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) {
    names.push_back("p" + std::to_string(i + 1));
    p.objects.push_back({names.back(), "place"});
  }
  p.init.add({"at", {names[0]}});
  p.init.add({"visited", {names[0]}});
  for (int i = 0; i + 1 < n; ++i) {
    p.init.add({"adj", {names[i], names[i + 1]}});
    p.init.add({"adj", {names[i + 1], names[i]}});
  }
  p.hard_goals.push_back({"at", {names[n - 1]}});
  return p;
}

// p1 - p2 - p3 with a dead-end branch p2 - b1 and a soft goal visited(b1).
// Optimal: take the detour (length 4, penalty 0, objective 4w) whenever
// penalty > 2w; the direct route scores 2w + penalty.
inline pddl::Problem detour_problem(double penalty = 1.0) {
  pddl::Problem p;
  p.domain = travel_domain();
  p.name = "detour";
  for (const char* o : {"p1", "p2", "p3", "b1"})
    p.objects.push_back({o, "place"});
  p.init.add({"at", {"p1"}});
  for (auto [a, b] : std::vector<std::pair<std::string, std::string>>{
           {"p1", "p2"}, {"p2", "p3"}, {"p2", "b1"}}) {
    p.init.add({"adj", {a, b}});
    p.init.add({"adj", {b, a}});
  }
  p.hard_goals.push_back({"at", {"p3"}});
  p.soft_goals.push_back({{"visited", {"b1"}}, penalty, "detour"});
  p.metric.kind = pddl::Metric::Kind::PenaltySum;
  return p;
}

// --- independent oracles ---------------------------------------------

// All type-consistent ground action signatures, by plain recursion over the
// declared objects. No pruning, no shared code with pddl::ground.
inline std::set<std::string> oracle_ground_sigs(const pddl::Problem& prob) {
  std::set<std::string> sigs;
  for (const auto& schema : prob.domain->actions) {
    std::vector<std::string> args(schema.params.size());
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == schema.params.size()) {
        sigs.insert(pddl::signature(schema.name, args));
        return;
      }
      for (const auto& obj : prob.objects)
        if (prob.domain->types.is_subtype(obj.type, schema.params[i].type)) {
          args[i] = obj.name;
          rec(i + 1);
        }
    };
    rec(0);
  }
  return sigs;
}

using AtomSet = std::set<pddl::GroundAtom>;

inline AtomSet to_set(const pddl::State& s) {
  return AtomSet(s.atoms().begin(), s.atoms().end());
}

// One oracle step: nullopt when a precondition is unmet.
inline std::optional<AtomSet> oracle_apply(const AtomSet& s,
                                           const pddl::GroundAction& a) {
  for (const auto& pre : a.precond)
    if (!s.count(pre)) return std::nullopt;
  AtomSet out = s;
  for (const auto& d : a.del) out.erase(d);
  for (const auto& ad : a.add) out.insert(ad);
  return out;
}

inline std::optional<std::vector<AtomSet>> oracle_simulate(
    const pddl::State& init, const plans::Plan& plan) {
  std::vector<AtomSet> trace{to_set(init)};
  for (const auto& a : plan) {
    auto next = oracle_apply(trace.back(), a);
    if (!next) return std::nullopt;
    trace.push_back(std::move(*next));
  }
  return trace;
}

// Random applicable walk of (up to) `len` steps. Uses the library's ground
// action set as the move pool but the oracle's applicability test.
inline plans::Plan random_walk(const pddl::Problem& prob, util::Rng& rng,
                               std::size_t len) {
  auto actions = pddl::ground(prob, pddl::GroundingPrune::None);
  plans::Plan plan;
  AtomSet s = to_set(prob.init);
  for (std::size_t step = 0; step < len; ++step) {
    std::vector<const pddl::GroundAction*> applicable;
    for (const auto& a : actions)
      if (oracle_apply(s, a)) applicable.push_back(&a);
    if (applicable.empty()) break;
    const auto* chosen = applicable[rng.below(applicable.size())];
    s = *oracle_apply(s, *chosen);
    plan.push_back(*chosen);
  }
  return plan;
}

// --- misc helpers ----------------------------------------------------

inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                         unsigned jobs = 0) {
  if (jobs == 0) jobs = std::thread::hardware_concurrency();
  if (jobs < 1) jobs = 1;
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(jobs);
  for (unsigned t = 0; t < jobs; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
        next = count;
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace support
