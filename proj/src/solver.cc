#include "replab/solver.h"

#include <algorithm>
#include <chrono>
#include <deque>
#include <queue>
#include <unordered_map>

#include "replab/ground_task.h"

namespace search {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

struct Node {
  Bits state;
  int parent = -1;
  int action = -1;
  int g = 0;
};

struct OpenEntry {
  double f = 0;
  int h = 0;
  int unsat_soft = 0;
  std::uint64_t tick = 0;  // FIFO among exact ties, for determinism
  int node = -1;

  bool operator>(const OpenEntry& o) const {
    if (f != o.f) return f > o.f;
    if (h != o.h) return h > o.h;
    if (unsat_soft != o.unsat_soft) return unsat_soft > o.unsat_soft;
    return tick > o.tick;
  }
};

plans::Plan rebuild_plan(const GroundTask& task, const std::deque<Node>& nodes,
                         int leaf) {
  std::vector<int> steps;
  for (int n = leaf; nodes[n].parent >= 0; n = nodes[n].parent)
    steps.push_back(nodes[n].action);
  std::reverse(steps.begin(), steps.end());
  plans::Plan plan;
  plan.reserve(steps.size());
  for (int a : steps) plan.push_back(task.ground_actions[a]);
  return plan;
}

bool applicable(const GroundTask::Action& a, const Bits& s) {
  for (int p : a.pre)
    if (!s.test(p)) return false;
  return true;
}

Bits successor(const GroundTask::Action& a, const Bits& s) {
  Bits out = s;
  for (int d : a.del) out.reset(d);
  for (int f : a.add) out.set(f);
  return out;
}

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::OptimalForBudget: return "optimal-for-budget";
    case SolveStatus::Satisficing: return "satisficing";
    case SolveStatus::Timeout: return "timeout";
    case SolveStatus::Unsolvable: return "unsolvable";
  }
  return "?";
}

PlanResult solve(const pddl::Problem& prob, const PlannerConfig& cfg) {
  auto start = Clock::now();
  PlanResult res;

  GroundTask task = GroundTask::build(prob);
  RelaxedExploration explore(task);

  if (task.hard_goal_missing) {
    res.status = SolveStatus::Unsolvable;
    res.wall_time_ms = ms_since(start);
    return res;
  }
  explore.run(task.init);
  if (explore.hmax(task.hard_goals) == kUnreachable) {
    res.status = SolveStatus::Unsolvable;
    res.wall_time_ms = ms_since(start);
    return res;
  }

  const double w = cfg.length_weight;
  std::deque<Node> nodes;  // reference-stable under push_back
  nodes.push_back({task.init, -1, -1, 0});
  std::unordered_map<Bits, int, BitsHash> best_g;
  best_g.emplace(task.init, 0);

  std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>> open;
  std::uint64_t tick = 0;
  open.push({0.0, 0, 0, tick++, 0});

  double incumbent_obj = 0;
  int incumbent_node = -1;
  bool have_incumbent = false;
  bool out_of_budget = false;

  std::vector<int> order_goals;  // heuristic goal set, rebuilt per node

  while (!open.empty()) {
    if (res.nodes_expanded >= cfg.node_budget) {
      out_of_budget = true;
      break;
    }
    if ((res.nodes_expanded & 0xff) == 0 &&
        ms_since(start) > cfg.time_budget_s * 1000.0) {
      out_of_budget = true;
      break;
    }

    OpenEntry top = open.top();
    open.pop();
    const Node& node = nodes[top.node];
    {
      auto it = best_g.find(node.state);
      if (it != best_g.end() && it->second < node.g) continue;  // stale
    }
    ++res.nodes_expanded;

    explore.run(node.state);
    int hmax_hard = explore.hmax(task.hard_goals);
    if (hmax_hard == kUnreachable) continue;  // dead end

    double end_penalty = task.end_penalty(node.state);
    bool goal_state = true;
    for (int g : task.hard_goals)
      if (!node.state.test(g)) {
        goal_state = false;
        break;
      }
    if (goal_state) {
      double obj = w * node.g + end_penalty;
      if (!have_incumbent || obj < incumbent_obj - 1e-12) {
        have_incumbent = true;
        incumbent_obj = obj;
        incumbent_node = top.node;
        res.incumbents.push_back(obj);
      }
      if (!cfg.anytime) break;
    }

    // Penalty no descendant can avoid: soft goals out of relaxed reach.
    double floor_penalty = task.stuck_soft_penalty;
    int unsat = 0;
    for (const auto& s : task.soft) {
      if (!explore.reachable(s.fact)) floor_penalty += s.penalty;
      if (!node.state.test(s.fact)) ++unsat;
    }
    if (have_incumbent &&
        w * (node.g + hmax_hard) + floor_penalty >= incumbent_obj - 1e-9)
      continue;  // cannot beat the incumbent

    // Ordering evaluation (deferred: successors inherit it).
    order_goals.assign(task.hard_goals.begin(), task.hard_goals.end());
    double residual = floor_penalty;
    if (cfg.soft_mode == SoftGoalMode::Pessimistic) {
      residual = task.stuck_soft_penalty;
      for (const auto& s : task.soft)
        if (!node.state.test(s.fact)) {
          residual += s.penalty;
          if (explore.reachable(s.fact)) order_goals.push_back(s.fact);
        }
    }
    int h;
    if (cfg.heuristic == Heuristic::RelaxedPlan) {
      h = explore.relaxed_plan_size(order_goals);
    } else {
      h = 0;
      for (int g : order_goals)
        if (!node.state.test(g)) ++h;
    }

    for (std::size_t ai = 0; ai < task.actions.size(); ++ai) {
      const auto& act = task.actions[ai];
      if (!applicable(act, node.state)) continue;
      Bits next = successor(act, node.state);
      int g2 = node.g + 1;
      auto [it, fresh] = best_g.emplace(next, g2);
      if (!fresh) {
        if (it->second <= g2) continue;
        it->second = g2;
      }
      int id = static_cast<int>(nodes.size());
      nodes.push_back({std::move(next), top.node, static_cast<int>(ai), g2});
      open.push({w * (g2 + h) + residual, h, unsat, tick++, id});
    }
  }

  res.wall_time_ms = ms_since(start);
  if (have_incumbent) {
    res.plan = rebuild_plan(task, nodes, incumbent_node);
    res.plan_length = res.plan->size();
    res.penalty_sum = incumbent_obj - w * static_cast<double>(res.plan_length);
    res.objective = incumbent_obj;
    if (cfg.anytime && !out_of_budget)
      res.status = SolveStatus::OptimalForBudget;
    else
      res.status = SolveStatus::Satisficing;
  } else if (out_of_budget) {
    res.status = SolveStatus::Timeout;
  } else {
    // Open list exhausted without reaching the hard goals.
    res.status = SolveStatus::Unsolvable;
  }
  return res;
}

PlanResult brute_force(const pddl::Problem& prob, std::size_t max_len,
                       std::size_t visit_guard, double length_weight) {
  auto start = Clock::now();
  GroundTask task = GroundTask::build(prob);
  PlanResult res;

  if (task.hard_goal_missing) {
    res.wall_time_ms = ms_since(start);
    throw NoPlanWithinBound("hard goal outside the reachable fact universe");
  }

  std::deque<Node> nodes;  // reference-stable under push_back
  nodes.push_back({task.init, -1, -1, 0});
  // First visit is the shallowest: deeper revisits cannot improve any
  // completion, so pruning them preserves the true optimum.
  std::unordered_map<Bits, int, BitsHash> seen;
  seen.emplace(task.init, 0);

  double best_obj = 0;
  int best_node = -1;
  std::size_t visits = 0;

  std::size_t layer_begin = 0, layer_end = 1;
  for (std::size_t depth = 0; layer_begin < layer_end; ++depth) {
    for (std::size_t ni = layer_begin; ni < layer_end; ++ni) {
      if (++visits > visit_guard)
        throw BruteForceLimit("brute_force visit guard exceeded");
      bool goal_state = true;
      for (int g : task.hard_goals)
        if (!nodes[ni].state.test(g)) {
          goal_state = false;
          break;
        }
      if (goal_state) {
        double obj = length_weight * static_cast<double>(depth) +
                     task.end_penalty(nodes[ni].state);
        if (best_node < 0 || obj < best_obj - 1e-12) {
          best_obj = obj;
          best_node = static_cast<int>(ni);
        }
      }
      if (depth == max_len) continue;
      for (std::size_t ai = 0; ai < task.actions.size(); ++ai) {
        const auto& act = task.actions[ai];
        if (!applicable(act, nodes[ni].state)) continue;
        Bits next = successor(act, nodes[ni].state);
        if (!seen.emplace(next, 0).second) continue;
        nodes.push_back({std::move(next), static_cast<int>(ni),
                         static_cast<int>(ai), static_cast<int>(depth) + 1});
      }
    }
    layer_begin = layer_end;
    layer_end = nodes.size();
  }

  res.wall_time_ms = ms_since(start);
  res.nodes_expanded = visits;
  if (best_node < 0)
    throw NoPlanWithinBound("no plan of length <= " + std::to_string(max_len) +
                            " reaches the hard goals");
  res.plan = rebuild_plan(task, nodes, best_node);
  res.plan_length = res.plan->size();
  res.objective = best_obj;
  res.penalty_sum =
      best_obj - length_weight * static_cast<double>(res.plan_length);
  res.status = SolveStatus::OptimalForBudget;
  return res;
}

double evaluate_plan(const pddl::Problem& prob, const plans::Plan& plan,
                     double length_weight) {
  plans::Validation v = plans::validate(prob, plan);
  if (!v.valid())
    throw std::runtime_error("evaluate_plan: plan does not solve the problem");
  return length_weight * static_cast<double>(plan.size()) + v.penalty_sum;
}

}  // namespace search
