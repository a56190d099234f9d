#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "replab/model.h"
#include "replab/plan_model.h"

namespace search {

enum class Heuristic { RelaxedPlan, GoalCount };

// How unachieved soft goals enter the node evaluation. Optimistic charges
// only goals that are relaxed-unreachable (a lower bound on any completion's
// penalty); Pessimistic charges every goal the current state has not yet
// achieved and folds the reachable ones into the heuristic's goal set, which
// gives the search an actual gradient toward satisfying them.
enum class SoftGoalMode { Optimistic, Pessimistic };

enum class SolveStatus { OptimalForBudget, Satisficing, Timeout, Unsolvable };

const char* to_string(SolveStatus s);

struct PlannerConfig {
  double time_budget_s = 60.0;
  std::size_t node_budget = 500000;  // expansions
  double length_weight = 0.01;       // w_len; penalties are integral, so
                                     // they dominate plan length by default
  Heuristic heuristic = Heuristic::RelaxedPlan;
  SoftGoalMode soft_mode = SoftGoalMode::Optimistic;
  bool anytime = true;  // false: return the first plan found
  std::uint64_t seed = 0;  // reserved; the search itself is deterministic
};

struct PlanResult {
  std::optional<plans::Plan> plan;
  double penalty_sum = 0;
  double objective = 0;  // length_weight * plan_length + penalty_sum
  std::size_t plan_length = 0;
  double wall_time_ms = 0;
  std::size_t nodes_expanded = 0;
  SolveStatus status = SolveStatus::Timeout;
  // Objective of each successive incumbent, for anytime diagnostics.
  std::vector<double> incumbents;
};

// Best-first anytime search over the grounded problem. The objective is
// length_weight * plan_length + end-state soft-goal penalty; the problem's
// own metric contributes only its penalty weighting (length_weight always
// comes from the config so every strategy is scored on one scale). Hard
// goals are never traded away. Deterministic for fixed inputs.
PlanResult solve(const pddl::Problem& prob, const PlannerConfig& cfg = {});

struct BruteForceLimit : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoPlanWithinBound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exhaustive depth-bounded enumeration with duplicate-state pruning; the
// certified optimum over plans of length <= max_len. Throws BruteForceLimit
// past `visit_guard` state visits and NoPlanWithinBound if no plan of that
// length reaches the hard goals.
PlanResult brute_force(const pddl::Problem& prob, std::size_t max_len,
                       std::size_t visit_guard = 10000000,
                       double length_weight = 0.01);

// Objective of an externally produced plan under the same scoring rule,
// using validate()'s achievement semantics for the penalty term.
double evaluate_plan(const pddl::Problem& prob, const plans::Plan& plan,
                     double length_weight = 0.01);

}  // namespace search
