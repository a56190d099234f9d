#pragma once

#include <string>

#include "replab/model.h"
#include "replab/plan_model.h"

namespace pddl {

enum class ProblemDialect {
  Plain,  // STRIPS only; throws SemanticError if the problem has soft goals
  Pddl3,  // named preferences plus an is-violated metric
};

// Canonical emitters. Output parses back to an equivalent() model and is
// byte-stable for a given input: sections in declaration order, two-space
// indent, one atom per line in :init. The Pddl3 dialect adds :preferences to
// the domain's requirements so external planners accept the paired problem.
std::string emit_domain(const Domain& dom,
                        ProblemDialect dialect = ProblemDialect::Plain);
std::string emit_problem(const Problem& prob,
                         ProblemDialect dialect = ProblemDialect::Pddl3);
std::string emit_plan(const plans::Plan& plan);
std::string emit_state(const State& state);

}  // namespace pddl
