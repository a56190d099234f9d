#pragma once

#include <map>
#include <string>
#include <vector>

#include "replab/constraints.h"
#include "replab/model.h"
#include "replab/plan_model.h"

namespace psp {

struct CompileOptions {
  // Keep the uninstrumented originals next to the marker-emitting copies
  // (faithful to the construction, worst case twice the operators), or swap
  // the copies in for the originals. Swapping halves branching and keeps the
  // original action names, so solved plans compare directly against the old
  // plan; semantics are unchanged because markers are monotone and appear in
  // no precondition.
  bool replace_originals = false;
};

// Where a compiled soft goal came from.
struct SoftGoalSource {
  enum class Kind { Similarity, Commitment };
  Kind kind = Kind::Similarity;
  std::string detail;  // constraint signature or commitment atom
};

struct CompiledProblem {
  pddl::Problem problem;   // augmented fluents/operators, I', G', soft goals
  pddl::Problem base;      // the perturbed problem as handed in
  ConstraintSet constraints;
  // Parallel to problem.soft_goals.
  std::vector<SoftGoalSource> soft_goal_source;
  // Instrumented action name -> original name (identity entries when
  // replace_originals kept the names).
  std::map<std::string, std::string> action_origin;
};

// The §5.1.1 action-similarity compilation: per lifted action with a
// constrained instance, a marker predicate `<name>-executed` over the
// action's parameters and a copy `<name>-tracked` that also adds its marker;
// per constraint, a soft goal on the ground marker. Throws SemanticError if
// cs is not ActionSimilarity, a constraint names an unknown action, or a
// marker name collides with an existing predicate or action.
CompiledProblem compile_action_similarity(const pddl::Problem& perturbed,
                                          const ConstraintSet& cs,
                                          const CompileOptions& opts = {});

// The §5.1.2 commitment compilation: per predicate occurring in the
// constraints, a marker `<pred>-achieved`; every action adding a constrained
// predicate gets a copy that also adds the matching markers; per constraint,
// a soft goal on the ground marker. Commitment atoms already true in the
// perturbed init are pre-marked achieved. Same error conditions as above.
CompiledProblem compile_commitments(const pddl::Problem& perturbed,
                                    const ConstraintSet& cs,
                                    const CompileOptions& opts = {});

// Dispatch on cs.kind; Empty is the identity compilation.
CompiledProblem compile(const pddl::Problem& perturbed, const ConstraintSet& cs,
                        const CompileOptions& opts = {});

// The compiled problem in PDDL3 form: every soft goal carries a preference
// name (assigned here if missing) so emit_problem can write it.
pddl::Problem to_preferences(const CompiledProblem& cp);

// Maps a plan on the compiled problem back onto the uncompiled perturbed
// problem: instrumented steps are re-resolved against the original schemas,
// everything else passes through.
plans::Plan strip_instrumentation(const CompiledProblem& cp,
                                  const plans::Plan& plan);

}  // namespace psp
