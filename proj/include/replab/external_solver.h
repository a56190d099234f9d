#pragma once

#include <stdexcept>
#include <string>

#include "replab/model.h"
#include "replab/solver.h"

namespace search {

struct ExternalSolverError : std::runtime_error {
  enum class Kind { ProcessFailure, UnparsableOutput, InvalidPlan };
  Kind kind;
  ExternalSolverError(Kind k, const std::string& msg)
      : std::runtime_error(msg), kind(k) {}
};

// Runs an external planner on the PDDL3 form of `prob`. The command template
// must contain the placeholders {domain}, {problem}, {plan_out} and may use
// {timeout} (whole seconds); it runs under /bin/sh in a fresh scratch
// directory (REPLAB_SCRATCH or the system temp dir). The returned plan is
// re-validated and re-scored internally; the external planner's own metric
// report, if any, is ignored. A process still running at the deadline is
// killed with its whole process group; if it left no usable plan the result
// is a Timeout status rather than an error.
PlanResult solve_external(const pddl::Problem& prob,
                          const std::string& command_template,
                          double timeout_s, double length_weight = 0.01);

}  // namespace search
