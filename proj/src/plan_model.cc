#include "replab/plan_model.h"

#include <algorithm>
#include <map>
#include <set>

namespace plans {

namespace {

std::string join_atoms(const std::vector<pddl::GroundAtom>& atoms) {
  std::string s;
  for (const auto& a : atoms) {
    if (!s.empty()) s += ", ";
    s += a.str();
  }
  return s;
}

std::vector<pddl::GroundAtom> missing_preconds(const pddl::State& s,
                                               const pddl::GroundAction& a) {
  std::vector<pddl::GroundAtom> missing;
  for (const auto& p : a.precond)
    if (!s.contains(p)) missing.push_back(p);
  return missing;
}

}  // namespace

PreconditionError::PreconditionError(const pddl::GroundAction& a,
                                     std::vector<pddl::GroundAtom> m)
    : std::runtime_error("preconditions of " + a.sig() + " do not hold: " +
                         join_atoms(m)),
      missing(std::move(m)) {}

SimulationError::SimulationError(std::size_t step_,
                                 const pddl::GroundAction& a,
                                 std::vector<pddl::GroundAtom> m)
    : std::runtime_error("step " + std::to_string(step_) + " (" + a.sig() +
                         "): preconditions do not hold: " + join_atoms(m)),
      step(step_),
      missing(std::move(m)) {}

pddl::State apply(const pddl::State& s, const pddl::GroundAction& a) {
  auto missing = missing_preconds(s, a);
  if (!missing.empty()) throw PreconditionError(a, std::move(missing));
  pddl::State out = s;
  for (const auto& d : a.del) out.remove(d);
  for (const auto& add : a.add) out.add(add);
  return out;
}

StateTrace simulate(const pddl::State& init, const Plan& plan) {
  StateTrace trace;
  trace.reserve(plan.size() + 1);
  trace.push_back(init);
  for (std::size_t i = 0; i < plan.size(); ++i) {
    auto missing = missing_preconds(trace.back(), plan[i]);
    if (!missing.empty()) throw SimulationError(i, plan[i], std::move(missing));
    trace.push_back(apply(trace.back(), plan[i]));
  }
  return trace;
}

Validation validate(const pddl::Problem& prob, const Plan& plan) {
  Validation v;
  StateTrace trace;
  try {
    trace = simulate(prob.init, plan);
  } catch (const SimulationError& e) {
    v.executable = false;
    v.failed_step = e.step;
    v.failure = e.what();
    return v;
  }
  v.executable = true;

  const pddl::State& end = trace.back();
  for (const auto& g : prob.hard_goals)
    if (!end.contains(g)) v.unmet_hard_goals.push_back(g);

  for (std::size_t i = 0; i < prob.soft_goals.size(); ++i) {
    const auto& g = prob.soft_goals[i];
    bool achieved = false;
    for (const auto& s : trace)
      if (s.contains(g.atom)) {
        achieved = true;
        break;
      }
    if (!achieved) {
      v.unsatisfied_soft_goals.push_back(i);
      v.penalty_sum += g.penalty * prob.metric.penalty_weight;
    }
  }
  return v;
}

PlanDiff plan_diff(const Plan& old_plan, const Plan& new_plan, bool multiset) {
  PlanDiff d;
  if (multiset) {
    std::map<std::string, std::size_t> a, b;
    for (const auto& act : old_plan) ++a[act.sig()];
    for (const auto& act : new_plan) ++b[act.sig()];
    for (const auto& [sig, n] : a) {
      auto it = b.find(sig);
      std::size_t kept = it == b.end() ? 0 : std::min(n, it->second);
      d.set_diff += n - kept;
    }
    d.sym_diff = d.set_diff;
    for (const auto& [sig, n] : b) {
      auto it = a.find(sig);
      std::size_t kept = it == a.end() ? 0 : std::min(n, it->second);
      d.sym_diff += n - kept;
    }
    return d;
  }

  std::set<std::string> a, b;
  for (const auto& act : old_plan) a.insert(act.sig());
  for (const auto& act : new_plan) b.insert(act.sig());
  for (const auto& sig : a)
    if (!b.count(sig)) ++d.set_diff;
  d.sym_diff = d.set_diff;
  for (const auto& sig : b)
    if (!a.count(sig)) ++d.sym_diff;
  return d;
}

std::vector<Commitment> extract_commitments(
    const pddl::Problem& prob, const Plan& plan,
    const std::vector<std::string>& preds) {
  simulate(prob.init, plan);  // pre: the plan must execute; throws otherwise
  std::set<std::string> wanted(preds.begin(), preds.end());
  std::vector<Commitment> out;
  for (const auto& a : plan)
    for (const auto& add : a.add)
      if (wanted.count(add.pred)) out.push_back(add);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace plans
