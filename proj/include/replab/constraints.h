#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "replab/model.h"
#include "replab/plan_model.h"

namespace psp {

// The three replanning models. M1 imposes nothing; M2 asks the new plan to
// reuse the old plan's actions; M3 asks it to re-achieve the old plan's
// commitments.
enum class ReplanModel { M1_Restart, M2_Similarity, M3_Commitment };

// Which part of the old plan similarity constraints range over. Executed
// actions cannot meaningfully be kept, so Suffix is the default; Full covers
// the whole plan for comparison runs.
enum class ConstraintScope { Suffix, Full };

struct SimilarityConstraint {
  std::string action;             // ground action name
  std::vector<std::string> args;  // its objects
  double penalty = 1.0;

  std::string sig() const { return pddl::signature(action, args); }
};

struct CommitmentConstraint {
  plans::Commitment atom;
  double penalty = 1.0;
};

// The constraint payload ψ attached to a replanning episode.
struct ConstraintSet {
  enum class Kind { Empty, ActionSimilarity, Commitments };
  Kind kind = Kind::Empty;
  std::vector<SimilarityConstraint> similarity;   // ActionSimilarity only
  std::vector<CommitmentConstraint> commitments;  // Commitments only
  std::vector<std::string> commitment_preds;      // as configured, recorded

  std::size_t size() const {
    return kind == Kind::ActionSimilarity ? similarity.size()
                                          : commitments.size();
  }
};

// Builds ψ for one model from the old plan. `executed_prefix_len` marks how
// far execution got before the perturbation struck; the prefix must simulate
// from prob.init (SimulationError otherwise). M2 emits one unit-penalty
// constraint per distinct unexecuted ground-action signature (or per
// signature anywhere in the plan under Full scope); M3 emits one per
// extracted commitment of the whole plan.
ConstraintSet build_constraints(ReplanModel model, const pddl::Problem& prob,
                                const plans::Plan& old_plan,
                                std::size_t executed_prefix_len,
                                const std::vector<std::string>& commitment_preds,
                                ConstraintScope scope = ConstraintScope::Suffix);

}  // namespace psp
