#include "replab/ground_task.h"

#include <algorithm>

namespace search {

Bits GroundTask::state_bits(const pddl::State& s) const {
  Bits b(fact_count());
  std::unordered_map<pddl::GroundAtom, int, pddl::GroundAtomHash> ids;
  ids.reserve(facts.size());
  for (std::size_t i = 0; i < facts.size(); ++i)
    ids.emplace(facts[i], static_cast<int>(i));
  for (const auto& atom : s.atoms()) {
    auto it = ids.find(atom);
    if (it != ids.end()) b.set(it->second);
  }
  return b;
}

pddl::State GroundTask::to_state(const Bits& b) const {
  std::vector<pddl::GroundAtom> atoms;
  for (std::size_t i = 0; i < facts.size(); ++i)
    if (b.test(static_cast<int>(i))) atoms.push_back(facts[i]);
  return pddl::State(std::move(atoms));
}

double GroundTask::end_penalty(const Bits& b) const {
  double p = stuck_soft_penalty;
  for (const auto& s : soft)
    if (!b.test(s.fact)) p += s.penalty;
  return p;
}

GroundTask GroundTask::build(const pddl::Problem& prob) {
  GroundTask t;
  t.penalty_weight = prob.metric.penalty_weight;
  t.ground_actions = pddl::ground(prob, pddl::GroundingPrune::Reachable);

  std::unordered_map<pddl::GroundAtom, int, pddl::GroundAtomHash> ids;
  auto intern = [&](const pddl::GroundAtom& atom) {
    auto it = ids.find(atom);
    if (it != ids.end()) return it->second;
    int id = static_cast<int>(t.facts.size());
    t.facts.push_back(atom);
    ids.emplace(atom, id);
    return id;
  };
  auto lookup = [&](const pddl::GroundAtom& atom) {
    auto it = ids.find(atom);
    return it == ids.end() ? -1 : it->second;
  };

  // Universe: init, then whatever pruned actions mention. Atoms beyond that
  // can never hold in a reachable state.
  for (const auto& atom : prob.init.atoms()) intern(atom);
  for (const auto& ga : t.ground_actions) {
    Action a;
    for (const auto& p : ga.precond) a.pre.push_back(intern(p));
    for (const auto& p : ga.add) a.add.push_back(intern(p));
    for (const auto& p : ga.del) a.del.push_back(intern(p));
    std::sort(a.pre.begin(), a.pre.end());
    std::sort(a.add.begin(), a.add.end());
    std::sort(a.del.begin(), a.del.end());
    t.actions.push_back(std::move(a));
  }

  t.watchers.resize(t.facts.size());
  for (std::size_t i = 0; i < t.actions.size(); ++i) {
    const Action& a = t.actions[i];
    if (a.pre.empty())
      t.no_precond_actions.push_back(static_cast<int>(i));
    for (int f : a.pre) t.watchers[f].push_back(static_cast<int>(i));
  }

  for (const auto& g : prob.hard_goals) {
    int id = lookup(g);
    if (id < 0)
      t.hard_goal_missing = true;
    else
      t.hard_goals.push_back(id);
  }

  for (std::size_t i = 0; i < prob.soft_goals.size(); ++i) {
    const auto& g = prob.soft_goals[i];
    double penalty = g.penalty * t.penalty_weight;
    int id = lookup(g.atom);
    if (id < 0)
      t.stuck_soft_penalty += penalty;
    else
      t.soft.push_back({id, penalty, i});
  }

  t.init = Bits(t.fact_count());
  for (const auto& atom : prob.init.atoms()) t.init.set(ids.at(atom));
  return t;
}

RelaxedExploration::RelaxedExploration(const GroundTask& task)
    : task_(task),
      fact_level_(task.fact_count(), kUnreachable),
      achiever_(task.fact_count(), -1),
      unmet_(task.actions.size(), 0),
      fact_marked_(task.fact_count(), 0),
      action_marked_(task.actions.size(), 0) {}

void RelaxedExploration::run(const Bits& state) {
  std::fill(fact_level_.begin(), fact_level_.end(), kUnreachable);
  std::fill(achiever_.begin(), achiever_.end(), -1);
  for (std::size_t i = 0; i < task_.actions.size(); ++i)
    unmet_[i] = static_cast<int>(task_.actions[i].pre.size());

  queue_.clear();
  for (std::size_t f = 0; f < task_.fact_count(); ++f)
    if (state.test(static_cast<int>(f))) {
      fact_level_[f] = 0;
      queue_.push_back(static_cast<int>(f));
    }

  auto fire = [&](int action) {
    int alevel = 0;
    for (int p : task_.actions[action].pre)
      alevel = std::max(alevel, fact_level_[p]);
    for (int f : task_.actions[action].add) {
      if (fact_level_[f] == kUnreachable) {
        fact_level_[f] = alevel + 1;
        achiever_[f] = action;
        queue_.push_back(f);
      }
    }
  };
  for (int a : task_.no_precond_actions) fire(a);

  // Facts enter the queue in nondecreasing level order, so the first
  // achiever recorded for a fact is a min-level one.
  for (std::size_t head = 0; head < queue_.size(); ++head) {
    int f = queue_[head];
    for (int a : task_.watchers[f])
      if (--unmet_[a] == 0) fire(a);
  }
}

int RelaxedExploration::hmax(const std::vector<int>& goals) const {
  int h = 0;
  for (int g : goals) {
    if (fact_level_[g] == kUnreachable) return kUnreachable;
    h = std::max(h, fact_level_[g]);
  }
  return h;
}

int RelaxedExploration::relaxed_plan_size(const std::vector<int>& goals) {
  std::fill(fact_marked_.begin(), fact_marked_.end(), 0);
  std::fill(action_marked_.begin(), action_marked_.end(), 0);

  // Backchain from the goals through first achievers. The achiever graph is
  // acyclic (precond levels are strictly below the achieved fact's level),
  // so a plain traversal terminates.
  std::vector<int> stack;
  for (int g : goals)
    if (!fact_marked_[g]) {
      fact_marked_[g] = 1;
      stack.push_back(g);
    }
  int count = 0;
  while (!stack.empty()) {
    int f = stack.back();
    stack.pop_back();
    int a = achiever_[f];
    if (fact_level_[f] == 0 || a < 0) continue;  // held in the start state
    if (action_marked_[a]) continue;
    action_marked_[a] = 1;
    ++count;
    for (int p : task_.actions[a].pre)
      if (!fact_marked_[p]) {
        fact_marked_[p] = 1;
        stack.push_back(p);
      }
  }
  return count;
}

}  // namespace search
