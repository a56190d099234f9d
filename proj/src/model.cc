#include "replab/model.h"

#include <cmath>
#include <set>
#include <stdexcept>

namespace pddl {

void TypeHierarchy::declare(const std::string& type, const std::string& parent) {
  if (type == "object") return;
  auto it = parent_.find(type);
  if (it != parent_.end() && it->second != parent)
    throw std::runtime_error("type '" + type + "' declared with two parents");
  parent_[type] = parent;
  // Cycle check: walk up from `type`; the chain must reach "object".
  std::set<std::string> seen;
  std::string cur = type;
  while (cur != "object") {
    if (!seen.insert(cur).second)
      throw std::runtime_error("type hierarchy cycle at '" + cur + "'");
    auto p = parent_.find(cur);
    if (p == parent_.end()) break;  // parent declared later; checked then
    cur = p->second;
  }
}

bool TypeHierarchy::declared(const std::string& type) const {
  return type == "object" || parent_.count(type) > 0;
}

bool TypeHierarchy::is_subtype(const std::string& type,
                               const std::string& ancestor) const {
  std::string cur = type;
  for (;;) {
    if (cur == ancestor) return true;
    if (cur == "object") return false;
    auto it = parent_.find(cur);
    if (it == parent_.end()) return ancestor == "object";
    cur = it->second;
  }
}

const PredicateSchema* Domain::find_predicate(const std::string& n) const {
  for (const auto& p : predicates)
    if (p.name == n) return &p;
  return nullptr;
}

const ActionSchema* Domain::find_action(const std::string& n) const {
  for (const auto& a : actions)
    if (a.name == n) return &a;
  return nullptr;
}

std::string GroundAtom::str() const { return signature(pred, args); }

std::string signature(const std::string& name,
                      const std::vector<std::string>& args) {
  std::string s = "(" + name;
  for (const auto& a : args) {
    s += ' ';
    s += a;
  }
  s += ')';
  return s;
}

State::State(std::vector<GroundAtom> atoms) : atoms_(std::move(atoms)) {
  std::sort(atoms_.begin(), atoms_.end());
  atoms_.erase(std::unique(atoms_.begin(), atoms_.end()), atoms_.end());
}

bool State::contains(const GroundAtom& a) const {
  return std::binary_search(atoms_.begin(), atoms_.end(), a);
}

bool State::contains_all(const std::vector<GroundAtom>& atoms) const {
  for (const auto& a : atoms)
    if (!contains(a)) return false;
  return true;
}

void State::add(const GroundAtom& a) {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), a);
  if (it == atoms_.end() || *it != a) atoms_.insert(it, a);
}

void State::remove(const GroundAtom& a) {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), a);
  if (it != atoms_.end() && *it == a) atoms_.erase(it);
}

std::optional<std::string> Problem::object_type(const std::string& obj) const {
  for (const auto& o : objects)
    if (o.name == obj) return o.type;
  return std::nullopt;
}

Problem with_init(const Problem& p, State init) {
  Problem out = p;
  out.init = std::move(init);
  return out;
}

namespace {

template <typename T>
std::vector<T> sorted(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  return v;
}

std::vector<ActionSchema> normalized_actions(const Domain& d) {
  std::vector<ActionSchema> acts = d.actions;
  for (auto& a : acts) {
    std::sort(a.precond.begin(), a.precond.end());
    std::sort(a.add.begin(), a.add.end());
    std::sort(a.del.begin(), a.del.end());
  }
  std::sort(acts.begin(), acts.end());
  return acts;
}

bool close(double a, double b) { return std::fabs(a - b) <= 1e-9; }

}  // namespace

bool equivalent(const Domain& a, const Domain& b) {
  return a.name == b.name && a.types == b.types &&
         sorted(a.predicates) == sorted(b.predicates) &&
         normalized_actions(a) == normalized_actions(b);
}

bool equivalent(const Problem& a, const Problem& b) {
  if (!a.domain || !b.domain || !equivalent(*a.domain, *b.domain)) return false;
  if (a.name != b.name) return false;
  if (sorted(a.objects) != sorted(b.objects)) return false;
  if (a.init != b.init) return false;
  if (sorted(a.hard_goals) != sorted(b.hard_goals)) return false;

  // Compare soft goals with penalty_weight folded in.
  auto fold = [](const Problem& p) {
    std::vector<SoftGoal> gs = p.soft_goals;
    for (auto& g : gs) g.penalty *= p.metric.penalty_weight;
    std::sort(gs.begin(), gs.end());
    return gs;
  };
  auto ga = fold(a), gb = fold(b);
  if (ga.size() != gb.size()) return false;
  for (std::size_t i = 0; i < ga.size(); ++i) {
    if (ga[i].atom != gb[i].atom || ga[i].name != gb[i].name ||
        !close(ga[i].penalty, gb[i].penalty))
      return false;
  }
  if (a.metric.kind != b.metric.kind) return false;
  if (a.metric.kind == Metric::Kind::WeightedSum &&
      !close(a.metric.length_weight, b.metric.length_weight))
    return false;
  return true;
}

}  // namespace pddl
