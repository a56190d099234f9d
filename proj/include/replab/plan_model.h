#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "replab/model.h"

namespace plans {

// A sequential plan over ground actions. Steps are indexed from 0.
using Plan = std::vector<pddl::GroundAction>;

// States visited by a plan: states[0] is the initial state and states[i + 1]
// the result of applying plan[i]. size() == plan length + 1.
using StateTrace = std::vector<pddl::State>;

struct PreconditionError : std::runtime_error {
  std::vector<pddl::GroundAtom> missing;
  PreconditionError(const pddl::GroundAction& a,
                    std::vector<pddl::GroundAtom> m);
};

struct SimulationError : std::runtime_error {
  std::size_t step;  // 0-based index of the failing action
  std::vector<pddl::GroundAtom> missing;
  SimulationError(std::size_t step_, const pddl::GroundAction& a,
                  std::vector<pddl::GroundAtom> m);
};

// Applies one action. Throws PreconditionError listing every unmet
// precondition atom.
pddl::State apply(const pddl::State& s, const pddl::GroundAction& a);

// Runs the whole plan from `init`. Throws SimulationError on the first
// inapplicable step.
StateTrace simulate(const pddl::State& init, const Plan& plan);

inline StateTrace simulate(const pddl::Problem& prob, const Plan& plan) {
  return simulate(prob.init, plan);
}

// Does the plan execute and reach all hard goals? Soft-goal accounting uses
// achievement semantics: a soft goal is satisfied if its atom holds in any
// state of the trace (the end state included).
struct Validation {
  bool executable = false;
  std::vector<pddl::GroundAtom> unmet_hard_goals;     // empty if !executable
  std::vector<std::size_t> unsatisfied_soft_goals;    // indices into soft_goals
  double penalty_sum = 0.0;  // sum over unsatisfied soft goals
  std::size_t failed_step = 0;  // set when !executable
  std::string failure;          // human-readable reason, or empty

  bool valid() const { return executable && unmet_hard_goals.empty(); }
};

Validation validate(const pddl::Problem& prob, const Plan& plan);

// Set-based plan difference over ground-action signatures. With `multiset`
// the counts matter (using (move a b) twice differs from using it once).
struct PlanDiff {
  std::size_t set_diff = 0;  // |old \ new|
  std::size_t sym_diff = 0;  // |old \ new| + |new \ old|
};

PlanDiff plan_diff(const Plan& old_plan, const Plan& new_plan,
                   bool multiset = false);

// A commitment is a ground atom some old-plan step makes true.
using Commitment = pddl::GroundAtom;

// Commitments of `plan`: every ground atom over a predicate in `preds` that
// appears in the add effects of some step. Sorted, duplicate-free. The plan
// must simulate from prob.init; SimulationError propagates otherwise.
std::vector<Commitment> extract_commitments(
    const pddl::Problem& prob, const Plan& plan,
    const std::vector<std::string>& preds);

}  // namespace plans
