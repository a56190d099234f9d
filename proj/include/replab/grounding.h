#pragma once

#include <vector>

#include "replab/model.h"

namespace pddl {

enum class GroundingPrune {
  None,       // every type-consistent instantiation
  Reachable,  // drop actions that never fire in the delete relaxation of init
};

// Instantiates every action schema over the problem's objects. Reachable
// pruning cannot remove an action that is applicable in any state reachable
// from init, so it does not change the set of valid plans. Output order is
// deterministic: schemas in declaration order, argument tuples in object
// declaration order.
std::vector<GroundAction> ground(
    const Problem& prob, GroundingPrune prune = GroundingPrune::Reachable);

// Binds one schema to concrete objects. Throws SemanticError on arity or
// type mismatch, or on undeclared objects. Ground del effects that collide
// with an add effect are dropped (adds win in (s \ del) ∪ add, so the
// transition function is unchanged and add ∩ del = ∅ holds).
GroundAction instantiate(const ActionSchema& schema,
                         const std::vector<std::string>& args,
                         const Problem& prob);

// Looks up `name` in the problem's domain and instantiates it; the usual way
// to turn a parsed plan step back into a GroundAction.
GroundAction resolve_step(const Problem& prob, const std::string& name,
                          const std::vector<std::string>& args);

}  // namespace pddl
