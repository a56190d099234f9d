#include "replab/grounding.h"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "replab/sexpr.h"

namespace pddl {

namespace {

std::vector<GroundAtom> bind_literals(const std::vector<SchemaLiteral>& lits,
                                      const std::map<std::string, std::string>& binding) {
  std::vector<GroundAtom> out;
  out.reserve(lits.size());
  for (const auto& lit : lits) {
    GroundAtom atom;
    atom.pred = lit.pred;
    for (const auto& var : lit.args) atom.args.push_back(binding.at(var));
    out.push_back(std::move(atom));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<GroundAction> reachable_subset(const Problem& prob,
                                           std::vector<GroundAction> actions) {
  std::unordered_set<GroundAtom, GroundAtomHash> facts(
      prob.init.atoms().begin(), prob.init.atoms().end());

  // remaining[i] = precond atoms of actions[i] not yet reachable.
  std::vector<std::size_t> remaining(actions.size());
  std::unordered_map<GroundAtom, std::vector<std::size_t>, GroundAtomHash>
      watchers;
  std::deque<std::size_t> ready;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    std::size_t unmet = 0;
    for (const auto& p : actions[i].precond) {
      if (!facts.count(p)) {
        ++unmet;
        watchers[p].push_back(i);
      }
    }
    remaining[i] = unmet;
    if (unmet == 0) ready.push_back(i);
  }

  std::vector<bool> fired(actions.size(), false);
  std::deque<GroundAtom> fresh;
  auto fire = [&](std::size_t i) {
    if (fired[i]) return;
    fired[i] = true;
    for (const auto& a : actions[i].add)
      if (facts.insert(a).second) fresh.push_back(a);
  };
  for (std::size_t i : ready) fire(i);
  while (!fresh.empty()) {
    GroundAtom f = std::move(fresh.front());
    fresh.pop_front();
    auto it = watchers.find(f);
    if (it == watchers.end()) continue;
    for (std::size_t i : it->second)
      if (--remaining[i] == 0) fire(i);
    watchers.erase(it);
  }

  std::vector<GroundAction> out;
  out.reserve(actions.size());
  for (std::size_t i = 0; i < actions.size(); ++i)
    if (fired[i]) out.push_back(std::move(actions[i]));
  return out;
}

}  // namespace

GroundAction instantiate(const ActionSchema& schema,
                         const std::vector<std::string>& args,
                         const Problem& prob) {
  if (args.size() != schema.params.size())
    throw SemanticError("action '" + schema.name + "' expects " +
                        std::to_string(schema.params.size()) +
                        " arguments, got " + std::to_string(args.size()));
  const TypeHierarchy& types = prob.domain->types;
  std::map<std::string, std::string> binding;
  for (std::size_t i = 0; i < args.size(); ++i) {
    auto type = prob.object_type(args[i]);
    if (!type)
      throw SemanticError("undeclared object '" + args[i] + "' in " +
                          signature(schema.name, args));
    if (!types.is_subtype(*type, schema.params[i].type))
      throw SemanticError("object '" + args[i] + "' of type '" + *type +
                          "' incompatible with parameter '" +
                          schema.params[i].name + " - " +
                          schema.params[i].type + "' of action '" +
                          schema.name + "'");
    binding[schema.params[i].name] = args[i];
  }

  GroundAction a;
  a.name = schema.name;
  a.args = args;
  a.precond = bind_literals(schema.precond, binding);
  a.add = bind_literals(schema.add, binding);
  a.del = bind_literals(schema.del, binding);
  // Distinct schema literals can collapse onto one atom; adds win.
  std::vector<GroundAtom> del;
  for (auto& d : a.del)
    if (!std::binary_search(a.add.begin(), a.add.end(), d))
      del.push_back(std::move(d));
  a.del = std::move(del);
  return a;
}

GroundAction resolve_step(const Problem& prob, const std::string& name,
                          const std::vector<std::string>& args) {
  const ActionSchema* schema = prob.domain->find_action(name);
  if (!schema) throw SemanticError("unknown action '" + name + "'");
  return instantiate(*schema, args, prob);
}

std::vector<GroundAction> ground(const Problem& prob, GroundingPrune prune) {
  // Objects compatible with each parameter type, in declaration order.
  std::map<std::string, std::vector<std::string>> by_type;
  auto candidates = [&](const std::string& type) -> const std::vector<std::string>& {
    auto it = by_type.find(type);
    if (it != by_type.end()) return it->second;
    std::vector<std::string> objs;
    for (const auto& o : prob.objects)
      if (prob.domain->types.is_subtype(o.type, type)) objs.push_back(o.name);
    return by_type.emplace(type, std::move(objs)).first->second;
  };

  std::vector<GroundAction> out;
  for (const auto& schema : prob.domain->actions) {
    std::vector<const std::vector<std::string>*> pools;
    bool empty_pool = false;
    for (const auto& p : schema.params) {
      pools.push_back(&candidates(p.type));
      if (pools.back()->empty()) empty_pool = true;
    }
    if (empty_pool) continue;

    std::vector<std::size_t> idx(pools.size(), 0);
    std::vector<std::string> args(pools.size());
    for (;;) {
      for (std::size_t i = 0; i < pools.size(); ++i) args[i] = (*pools[i])[idx[i]];
      out.push_back(instantiate(schema, args, prob));
      // Odometer increment, last parameter fastest.
      std::size_t k = pools.size();
      while (k > 0) {
        --k;
        if (++idx[k] < pools[k]->size()) break;
        idx[k] = 0;
        if (k == 0) goto schema_done;
      }
      if (pools.empty()) break;  // nullary schema grounds exactly once
    }
  schema_done:;
  }

  if (prune == GroundingPrune::Reachable)
    out = reachable_subset(prob, std::move(out));
  return out;
}

}  // namespace pddl
