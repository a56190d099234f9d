#include "replab/constraints.h"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace psp {

ConstraintSet build_constraints(ReplanModel model, const pddl::Problem& prob,
                                const plans::Plan& old_plan,
                                std::size_t executed_prefix_len,
                                const std::vector<std::string>& commitment_preds,
                                ConstraintScope scope) {
  if (executed_prefix_len > old_plan.size())
    throw std::invalid_argument(
        "executed_prefix_len exceeds the old plan's length");
  plans::Plan prefix(old_plan.begin(), old_plan.begin() + executed_prefix_len);
  plans::simulate(prob.init, prefix);  // pre: the executed part really ran

  ConstraintSet cs;
  cs.commitment_preds = commitment_preds;
  switch (model) {
    case ReplanModel::M1_Restart:
      cs.kind = ConstraintSet::Kind::Empty;
      break;

    case ReplanModel::M2_Similarity: {
      cs.kind = ConstraintSet::Kind::ActionSimilarity;
      std::size_t begin =
          scope == ConstraintScope::Suffix ? executed_prefix_len : 0;
      std::set<std::string> seen;
      for (std::size_t i = begin; i < old_plan.size(); ++i) {
        const auto& a = old_plan[i];
        if (!seen.insert(a.sig()).second) continue;
        cs.similarity.push_back({a.name, a.args, 1.0});
      }
      std::sort(cs.similarity.begin(), cs.similarity.end(),
                [](const SimilarityConstraint& x, const SimilarityConstraint& y) {
                  return x.sig() < y.sig();
                });
      break;
    }

    case ReplanModel::M3_Commitment: {
      cs.kind = ConstraintSet::Kind::Commitments;
      auto atoms = plans::extract_commitments(prob, old_plan, commitment_preds);
      for (auto& atom : atoms) cs.commitments.push_back({std::move(atom), 1.0});
      break;
    }
  }
  return cs;
}

}  // namespace psp
