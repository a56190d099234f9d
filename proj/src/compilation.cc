#include "replab/compilation.h"

#include <algorithm>
#include <memory>
#include <set>

#include "replab/grounding.h"
#include "replab/sexpr.h"

namespace psp {

namespace {

using pddl::ActionSchema;
using pddl::Domain;
using pddl::GroundAtom;
using pddl::Metric;
using pddl::PredicateSchema;
using pddl::Problem;
using pddl::SchemaLiteral;
using pddl::SemanticError;
using pddl::SoftGoal;

void check_marker_free(const Domain& dom, const std::string& marker) {
  if (dom.find_predicate(marker))
    throw SemanticError("marker predicate '" + marker +
                        "' collides with a domain predicate");
  if (dom.find_action(marker))
    throw SemanticError("marker predicate '" + marker +
                        "' collides with a domain action");
}

// Declares `marker` with the same parameters as `params`.
void add_marker_predicate(Domain& dom, const std::string& marker,
                          const std::vector<pddl::Param>& params) {
  check_marker_free(dom, marker);
  PredicateSchema schema;
  schema.name = marker;
  schema.params = params;
  dom.predicates.push_back(std::move(schema));
}

// Installs `copy` next to (or in place of) the schema it was built from.
// Returns the name the instrumented behavior lives under.
std::string install_copy(Domain& dom, const ActionSchema& original,
                         ActionSchema copy, bool replace,
                         std::map<std::string, std::string>& origin) {
  if (replace) {
    copy.name = original.name;
    for (auto& a : dom.actions)
      if (a.name == original.name) a = copy;
    origin[copy.name] = original.name;
    return original.name;
  }
  copy.name = original.name + "-tracked";
  if (dom.find_action(copy.name) || dom.find_predicate(copy.name))
    throw SemanticError("instrumented action name '" + copy.name +
                        "' collides with an existing schema");
  origin[copy.name] = original.name;
  dom.actions.push_back(copy);
  return copy.name;
}

Metric penalty_metric() {
  Metric m;
  m.kind = Metric::Kind::PenaltySum;
  m.penalty_weight = 1.0;
  return m;
}

}  // namespace

CompiledProblem compile_action_similarity(const Problem& perturbed,
                                          const ConstraintSet& cs,
                                          const CompileOptions& opts) {
  if (cs.kind != ConstraintSet::Kind::ActionSimilarity)
    throw SemanticError("compile_action_similarity needs an ActionSimilarity set");

  CompiledProblem cp;
  cp.base = perturbed;
  cp.constraints = cs;
  if (cs.similarity.empty()) {
    cp.problem = perturbed;
    return cp;
  }

  auto dom = std::make_shared<Domain>(*perturbed.domain);

  // One marker predicate and one instrumented copy per lifted action that
  // has a constrained instance.
  std::set<std::string> lifted;
  for (const auto& c : cs.similarity) lifted.insert(c.action);
  for (const auto& name : lifted) {
    const ActionSchema* schema = dom->find_action(name);
    if (!schema)
      throw SemanticError("similarity constraint over unknown action '" +
                          name + "'");
    std::string marker = name + "-executed";
    add_marker_predicate(*dom, marker, schema->params);

    ActionSchema copy = *schema;
    SchemaLiteral effect;
    effect.pred = marker;
    for (const auto& p : schema->params) effect.args.push_back(p.name);
    copy.add.push_back(std::move(effect));
    install_copy(*dom, *schema, std::move(copy), opts.replace_originals,
                 cp.action_origin);
  }

  cp.problem = perturbed;
  cp.problem.domain = dom;
  cp.problem.soft_goals.clear();
  for (std::size_t i = 0; i < cs.similarity.size(); ++i) {
    const auto& c = cs.similarity[i];
    SoftGoal g;
    g.atom = GroundAtom{c.action + "-executed", c.args};
    g.penalty = c.penalty;
    g.name = "sim-" + std::to_string(i);
    cp.problem.soft_goals.push_back(std::move(g));
    cp.soft_goal_source.push_back(
        {SoftGoalSource::Kind::Similarity, c.sig()});
  }
  cp.problem.metric = penalty_metric();
  return cp;
}

CompiledProblem compile_commitments(const Problem& perturbed,
                                    const ConstraintSet& cs,
                                    const CompileOptions& opts) {
  if (cs.kind != ConstraintSet::Kind::Commitments)
    throw SemanticError("compile_commitments needs a Commitments set");

  CompiledProblem cp;
  cp.base = perturbed;
  cp.constraints = cs;
  if (cs.commitments.empty()) {
    cp.problem = perturbed;
    return cp;
  }

  auto dom = std::make_shared<Domain>(*perturbed.domain);

  // Markers for the predicates the constraints actually mention.
  std::set<std::string> preds;
  for (const auto& c : cs.commitments) preds.insert(c.atom.pred);
  for (const auto& pred : preds) {
    const PredicateSchema* schema = dom->find_predicate(pred);
    if (!schema)
      throw SemanticError("commitment predicate '" + pred +
                          "' not declared in the domain");
    add_marker_predicate(*dom, pred + "-achieved", schema->params);
  }

  // Copy every action that adds a constrained predicate; the copy also adds
  // the matching markers.
  std::vector<ActionSchema> originals = perturbed.domain->actions;
  for (const auto& schema : originals) {
    std::vector<SchemaLiteral> markers;
    for (const auto& add : schema.add)
      if (preds.count(add.pred))
        markers.push_back({add.pred + "-achieved", add.args});
    if (markers.empty()) continue;
    ActionSchema copy = *dom->find_action(schema.name);
    for (auto& m : markers) copy.add.push_back(std::move(m));
    install_copy(*dom, schema, std::move(copy), opts.replace_originals,
                 cp.action_origin);
  }

  cp.problem = perturbed;
  cp.problem.domain = dom;
  cp.problem.soft_goals.clear();
  for (std::size_t i = 0; i < cs.commitments.size(); ++i) {
    const auto& c = cs.commitments[i];
    GroundAtom marker{c.atom.pred + "-achieved", c.atom.args};
    SoftGoal g;
    g.atom = marker;
    g.penalty = c.penalty;
    g.name = "com-" + std::to_string(i);
    cp.problem.soft_goals.push_back(std::move(g));
    cp.soft_goal_source.push_back(
        {SoftGoalSource::Kind::Commitment, c.atom.str()});
    // A commitment the world already satisfies needs no re-achievement.
    if (perturbed.init.contains(c.atom)) cp.problem.init.add(marker);
  }
  cp.problem.metric = penalty_metric();
  return cp;
}

CompiledProblem compile(const Problem& perturbed, const ConstraintSet& cs,
                        const CompileOptions& opts) {
  switch (cs.kind) {
    case ConstraintSet::Kind::Empty: {
      CompiledProblem cp;
      cp.problem = perturbed;
      cp.base = perturbed;
      cp.constraints = cs;
      return cp;
    }
    case ConstraintSet::Kind::ActionSimilarity:
      return compile_action_similarity(perturbed, cs, opts);
    case ConstraintSet::Kind::Commitments:
      return compile_commitments(perturbed, cs, opts);
  }
  throw SemanticError("compile: unknown constraint kind");
}

Problem to_preferences(const CompiledProblem& cp) {
  Problem out = cp.problem;
  for (std::size_t i = 0; i < out.soft_goals.size(); ++i)
    if (out.soft_goals[i].name.empty())
      out.soft_goals[i].name = "pref-" + std::to_string(i);
  return out;
}

plans::Plan strip_instrumentation(const CompiledProblem& cp,
                                  const plans::Plan& plan) {
  plans::Plan out;
  out.reserve(plan.size());
  for (const auto& step : plan) {
    auto it = cp.action_origin.find(step.name);
    const std::string& name = it == cp.action_origin.end() ? step.name
                                                           : it->second;
    out.push_back(pddl::resolve_step(cp.base, name, step.args));
  }
  return out;
}

}  // namespace psp
