#include "replab/parser.h"

#include <map>
#include <set>
#include <string>

namespace pddl {

namespace {

const std::set<std::string> kKnownRequirements = {":strips", ":typing",
                                                  ":preferences"};

void expect_list(const Sexpr& e, const char* what) {
  if (!e.is_list()) throw ParseError(std::string("expected ") + what, e.pos);
}

std::string expect_symbol(const Sexpr& e, const char* what) {
  if (!e.is_symbol())
    throw ParseError(std::string("expected ") + what, e.pos);
  return e.text;
}

bool is_variable(const std::string& s) { return !s.empty() && s[0] == '?'; }

// Parses a typed name list: `a b - t c - u d` (untyped names get "object").
// Each entry in the result is (name, type, pos).
struct TypedName {
  std::string name;
  std::string type;
  SourcePos pos;
};

std::vector<TypedName> parse_typed_list(const std::vector<Sexpr>& items,
                                        std::size_t begin) {
  std::vector<TypedName> out;
  std::vector<std::size_t> pending;  // indices into `out` awaiting a type
  for (std::size_t i = begin; i < items.size(); ++i) {
    const Sexpr& e = items[i];
    std::string tok = expect_symbol(e, "name or '-'");
    if (tok == "-") {
      if (pending.empty())
        throw ParseError("'-' with no names before it", e.pos);
      if (i + 1 >= items.size())
        throw ParseError("'-' with no type after it", e.pos);
      std::string type = expect_symbol(items[i + 1], "type name");
      for (std::size_t k : pending) out[k].type = type;
      pending.clear();
      ++i;
    } else {
      pending.push_back(out.size());
      out.push_back({tok, "object", e.pos});
    }
  }
  return out;
}

SchemaLiteral parse_schema_literal(const Sexpr& e, const ActionSchema& action,
                                   const Domain& dom,
                                   const std::map<std::string, std::string>& param_types) {
  expect_list(e, "atom");
  if (e.items.empty() || !e.items[0].is_symbol())
    throw ParseError("atom must start with a predicate name", e.pos);
  SchemaLiteral lit;
  lit.pred = e.items[0].text;
  const PredicateSchema* schema = dom.find_predicate(lit.pred);
  if (!schema)
    throw SemanticError("unknown predicate '" + lit.pred + "' in action '" +
                            action.name + "'",
                        e.pos);
  if (e.items.size() - 1 != schema->params.size())
    throw SemanticError("predicate '" + lit.pred + "' expects " +
                            std::to_string(schema->params.size()) +
                            " arguments, got " +
                            std::to_string(e.items.size() - 1),
                        e.pos);
  for (std::size_t i = 1; i < e.items.size(); ++i) {
    std::string arg = expect_symbol(e.items[i], "argument");
    if (!is_variable(arg))
      throw SemanticError("constant '" + arg + "' in action '" + action.name +
                              "'; only parameters are allowed in this fragment",
                          e.items[i].pos);
    auto it = param_types.find(arg);
    if (it == param_types.end())
      throw SemanticError("variable '" + arg + "' not a parameter of action '" +
                              action.name + "'",
                          e.items[i].pos);
    if (!dom.types.is_subtype(it->second, schema->params[i - 1].type))
      throw SemanticError("argument '" + arg + "' of type '" + it->second +
                              "' incompatible with parameter type '" +
                              schema->params[i - 1].type + "' of predicate '" +
                              lit.pred + "'",
                          e.items[i].pos);
    lit.args.push_back(arg);
  }
  return lit;
}

// Parses `(and X...)` or a single X into a vector of X nodes.
std::vector<const Sexpr*> conjunction_items(const Sexpr& e) {
  std::vector<const Sexpr*> out;
  if (e.is_list() && e.head() == "and") {
    for (std::size_t i = 1; i < e.items.size(); ++i) out.push_back(&e.items[i]);
  } else {
    out.push_back(&e);
  }
  return out;
}

void parse_requirements(const Sexpr& sec) {
  for (std::size_t i = 1; i < sec.items.size(); ++i) {
    std::string req = expect_symbol(sec.items[i], "requirement flag");
    if (!kKnownRequirements.count(req))
      throw SemanticError("unsupported requirement '" + req + "'",
                          sec.items[i].pos);
  }
}

void parse_types_section(const Sexpr& sec, Domain& dom) {
  auto typed = parse_typed_list(sec.items, 1);
  try {
    for (const auto& t : typed) dom.types.declare(t.name, t.type);
    // Parents that are only mentioned as parents get declared under object.
    for (const auto& t : typed)
      if (!dom.types.declared(t.type)) dom.types.declare(t.type, "object");
  } catch (const std::runtime_error& e) {
    throw SemanticError(e.what(), sec.pos);
  }
}

void parse_predicates_section(const Sexpr& sec, Domain& dom) {
  for (std::size_t i = 1; i < sec.items.size(); ++i) {
    const Sexpr& p = sec.items[i];
    expect_list(p, "predicate declaration");
    if (p.items.empty() || !p.items[0].is_symbol())
      throw ParseError("predicate declaration must start with a name", p.pos);
    PredicateSchema schema;
    schema.name = p.items[0].text;
    if (dom.find_predicate(schema.name))
      throw SemanticError("duplicate predicate '" + schema.name + "'", p.pos);
    auto typed = parse_typed_list(p.items, 1);
    std::set<std::string> seen;
    for (const auto& t : typed) {
      if (!is_variable(t.name))
        throw SemanticError("predicate parameter '" + t.name +
                                "' must be a ?variable",
                            t.pos);
      if (!seen.insert(t.name).second)
        throw SemanticError("duplicate parameter '" + t.name +
                                "' in predicate '" + schema.name + "'",
                            t.pos);
      if (!dom.types.declared(t.type))
        throw SemanticError("unknown type '" + t.type + "' in predicate '" +
                                schema.name + "'",
                            t.pos);
      schema.params.push_back({t.name, t.type});
    }
    dom.predicates.push_back(std::move(schema));
  }
}

void parse_action_section(const Sexpr& sec, Domain& dom) {
  if (sec.items.size() < 2 || !sec.items[1].is_symbol())
    throw ParseError("action must have a name", sec.pos);
  ActionSchema action;
  action.name = sec.items[1].text;
  if (dom.find_action(action.name))
    throw SemanticError("duplicate action '" + action.name + "'", sec.pos);

  std::map<std::string, std::string> param_types;
  const Sexpr* precond_node = nullptr;
  const Sexpr* effect_node = nullptr;
  for (std::size_t i = 2; i < sec.items.size(); i += 2) {
    std::string key = expect_symbol(sec.items[i], "action keyword");
    if (i + 1 >= sec.items.size())
      throw ParseError("missing value after '" + key + "'", sec.items[i].pos);
    const Sexpr& val = sec.items[i + 1];
    if (key == ":parameters") {
      expect_list(val, "parameter list");
      auto typed = parse_typed_list(val.items, 0);
      for (const auto& t : typed) {
        if (!is_variable(t.name))
          throw SemanticError("action parameter '" + t.name +
                                  "' must be a ?variable",
                              t.pos);
        if (param_types.count(t.name))
          throw SemanticError("duplicate parameter '" + t.name +
                                  "' in action '" + action.name + "'",
                              t.pos);
        if (!dom.types.declared(t.type))
          throw SemanticError("unknown type '" + t.type + "' in action '" +
                                  action.name + "'",
                              t.pos);
        param_types[t.name] = t.type;
        action.params.push_back({t.name, t.type});
      }
    } else if (key == ":precondition") {
      precond_node = &val;
    } else if (key == ":effect") {
      effect_node = &val;
    } else {
      throw ParseError("unknown action keyword '" + key + "'",
                       sec.items[i].pos);
    }
  }

  if (precond_node) {
    for (const Sexpr* c : conjunction_items(*precond_node))
      action.precond.push_back(
          parse_schema_literal(*c, action, dom, param_types));
  }
  if (effect_node) {
    for (const Sexpr* c : conjunction_items(*effect_node)) {
      if (c->is_list() && c->head() == "not") {
        if (c->items.size() != 2)
          throw ParseError("'not' takes exactly one atom", c->pos);
        action.del.push_back(
            parse_schema_literal(c->items[1], action, dom, param_types));
      } else {
        action.add.push_back(
            parse_schema_literal(*c, action, dom, param_types));
      }
    }
  }
  for (const auto& a : action.add)
    for (const auto& d : action.del)
      if (a == d)
        throw SemanticError("action '" + action.name + "' both adds and deletes " +
                            signature(a.pred, a.args));
  dom.actions.push_back(std::move(action));
}

GroundAtom parse_ground_atom(const Sexpr& e, const Problem& prob,
                             const char* context) {
  expect_list(e, "atom");
  if (e.items.empty() || !e.items[0].is_symbol())
    throw ParseError("atom must start with a predicate name", e.pos);
  GroundAtom atom;
  atom.pred = e.items[0].text;
  const PredicateSchema* schema = prob.domain->find_predicate(atom.pred);
  if (!schema)
    throw SemanticError(std::string("unknown predicate '") + atom.pred +
                            "' in " + context,
                        e.pos);
  if (e.items.size() - 1 != schema->params.size())
    throw SemanticError("predicate '" + atom.pred + "' expects " +
                            std::to_string(schema->params.size()) +
                            " arguments, got " +
                            std::to_string(e.items.size() - 1),
                        e.pos);
  for (std::size_t i = 1; i < e.items.size(); ++i) {
    std::string arg = expect_symbol(e.items[i], "object name");
    auto type = prob.object_type(arg);
    if (!type)
      throw SemanticError(std::string("undeclared object '") + arg + "' in " +
                              context,
                          e.items[i].pos);
    if (!prob.domain->types.is_subtype(*type, schema->params[i - 1].type))
      throw SemanticError("object '" + arg + "' of type '" + *type +
                              "' incompatible with parameter type '" +
                              schema->params[i - 1].type + "' of predicate '" +
                              atom.pred + "'",
                          e.items[i].pos);
    atom.args.push_back(arg);
  }
  return atom;
}

struct MetricTerm {
  double coefficient = 1.0;
  bool is_length = false;        // (total-time)
  std::string preference;        // (is-violated <name>), when !is_length
};

MetricTerm parse_metric_term(const Sexpr& e) {
  MetricTerm term;
  expect_list(e, "metric term");
  const Sexpr* body = &e;
  if (e.head() == "*") {
    if (e.items.size() != 3 || !e.items[1].is_number())
      throw ParseError("expected (* <number> <term>)", e.pos);
    term.coefficient = e.items[1].number;
    body = &e.items[2];
    expect_list(*body, "metric term");
  }
  if (body->head() == "total-time") {
    term.is_length = true;
  } else if (body->head() == "is-violated") {
    if (body->items.size() != 2 || !body->items[1].is_symbol())
      throw ParseError("expected (is-violated <preference>)", body->pos);
    term.preference = body->items[1].text;
  } else {
    throw ParseError("unsupported metric term", body->pos);
  }
  return term;
}

void parse_metric_section(const Sexpr& sec, Problem& prob) {
  if (sec.items.size() != 3 || !sec.items[1].is_symbol("minimize"))
    throw ParseError("expected (:metric minimize <expr>)", sec.pos);
  const Sexpr& expr = sec.items[2];
  std::vector<MetricTerm> terms;
  if (expr.is_list() && expr.head() == "+") {
    for (std::size_t i = 1; i < expr.items.size(); ++i)
      terms.push_back(parse_metric_term(expr.items[i]));
  } else {
    terms.push_back(parse_metric_term(expr));
  }

  bool has_length = false;
  double length_weight = 0.0;
  std::map<std::string, double> pref_penalty;
  for (const auto& t : terms) {
    if (t.is_length) {
      if (has_length)
        throw SemanticError("duplicate (total-time) term in metric", sec.pos);
      has_length = true;
      length_weight = t.coefficient;
    } else {
      bool known = false;
      for (const auto& g : prob.soft_goals)
        if (g.name == t.preference) known = true;
      if (!known)
        throw SemanticError("metric references unknown preference '" +
                                t.preference + "'",
                            sec.pos);
      if (pref_penalty.count(t.preference))
        throw SemanticError("duplicate metric term for preference '" +
                                t.preference + "'",
                            sec.pos);
      if (t.coefficient < 0)
        throw SemanticError("negative penalty for preference '" +
                                t.preference + "'",
                            sec.pos);
      pref_penalty[t.preference] = t.coefficient;
    }
  }

  // Preferences absent from the metric contribute nothing to the objective.
  for (auto& g : prob.soft_goals) {
    auto it = pref_penalty.find(g.name);
    g.penalty = it == pref_penalty.end() ? 0.0 : it->second;
  }
  if (has_length && !pref_penalty.empty()) {
    prob.metric.kind = Metric::Kind::WeightedSum;
    prob.metric.length_weight = length_weight;
  } else if (has_length) {
    prob.metric.kind = Metric::Kind::PlanLength;
  } else {
    prob.metric.kind = Metric::Kind::PenaltySum;
  }
  prob.metric.penalty_weight = 1.0;
}

}  // namespace

Domain parse_domain(std::string_view text) {
  Sexpr root = parse_sexpr(text);
  expect_list(root, "(define ...)");
  if (root.head() != "define")
    throw ParseError("expected (define (domain ...) ...)", root.pos);
  if (root.items.size() < 2 || !root.items[1].is_list() ||
      root.items[1].head() != "domain" || root.items[1].items.size() != 2)
    throw ParseError("expected (domain <name>)", root.pos);

  Domain dom;
  dom.name = expect_symbol(root.items[1].items[1], "domain name");

  for (std::size_t i = 2; i < root.items.size(); ++i) {
    const Sexpr& sec = root.items[i];
    expect_list(sec, "domain section");
    std::string_view head = sec.head();
    if (head == ":requirements") {
      parse_requirements(sec);
    } else if (head == ":types") {
      parse_types_section(sec, dom);
    } else if (head == ":predicates") {
      parse_predicates_section(sec, dom);
    } else if (head == ":action") {
      parse_action_section(sec, dom);
    } else {
      throw ParseError("unknown domain section", sec.pos);
    }
  }
  return dom;
}

Problem parse_problem(std::string_view text, DomainRef domain) {
  if (!domain) throw SemanticError("parse_problem: null domain");
  Sexpr root = parse_sexpr(text);
  expect_list(root, "(define ...)");
  if (root.head() != "define")
    throw ParseError("expected (define (problem ...) ...)", root.pos);
  if (root.items.size() < 2 || !root.items[1].is_list() ||
      root.items[1].head() != "problem" || root.items[1].items.size() != 2)
    throw ParseError("expected (problem <name>)", root.pos);

  Problem prob;
  prob.domain = std::move(domain);
  prob.name = expect_symbol(root.items[1].items[1], "problem name");

  const Sexpr* metric_section = nullptr;
  bool saw_domain_ref = false;
  for (std::size_t i = 2; i < root.items.size(); ++i) {
    const Sexpr& sec = root.items[i];
    expect_list(sec, "problem section");
    std::string_view head = sec.head();
    if (head == ":domain") {
      if (sec.items.size() != 2)
        throw ParseError("expected (:domain <name>)", sec.pos);
      std::string name = expect_symbol(sec.items[1], "domain name");
      if (name != prob.domain->name)
        throw SemanticError("problem references domain '" + name +
                                "' but was parsed against '" +
                                prob.domain->name + "'",
                            sec.pos);
      saw_domain_ref = true;
    } else if (head == ":objects") {
      auto typed = parse_typed_list(sec.items, 1);
      for (const auto& t : typed) {
        if (prob.object_type(t.name))
          throw SemanticError("duplicate object '" + t.name + "'", t.pos);
        if (!prob.domain->types.declared(t.type))
          throw SemanticError("unknown type '" + t.type + "' for object '" +
                                  t.name + "'",
                              t.pos);
        prob.objects.push_back({t.name, t.type});
      }
    } else if (head == ":init") {
      std::vector<GroundAtom> atoms;
      for (std::size_t k = 1; k < sec.items.size(); ++k)
        atoms.push_back(parse_ground_atom(sec.items[k], prob, "init"));
      prob.init = State(std::move(atoms));
    } else if (head == ":goal") {
      if (sec.items.size() != 2)
        throw ParseError("expected (:goal <conjunction>)", sec.pos);
      for (const Sexpr* c : conjunction_items(sec.items[1])) {
        if (c->is_list() && c->head() == "preference") {
          if (c->items.size() != 3 || !c->items[1].is_symbol())
            throw ParseError("expected (preference <name> <atom>)", c->pos);
          SoftGoal g;
          g.name = c->items[1].text;
          for (const auto& existing : prob.soft_goals)
            if (existing.name == g.name)
              throw SemanticError("duplicate preference name '" + g.name + "'",
                                  c->pos);
          g.atom = parse_ground_atom(c->items[2], prob, "goal");
          for (const auto& existing : prob.soft_goals)
            if (existing.atom == g.atom)
              throw SemanticError("duplicate soft-goal atom " + g.atom.str(),
                                  c->pos);
          g.penalty = 1.0;
          prob.soft_goals.push_back(std::move(g));
        } else {
          GroundAtom atom = parse_ground_atom(*c, prob, "goal");
          auto it = std::lower_bound(prob.hard_goals.begin(),
                                     prob.hard_goals.end(), atom);
          if (it == prob.hard_goals.end() || *it != atom)
            prob.hard_goals.insert(it, atom);
        }
      }
    } else if (head == ":metric") {
      metric_section = &sec;
    } else {
      throw ParseError("unknown problem section", sec.pos);
    }
  }
  if (!saw_domain_ref)
    throw SemanticError("problem is missing a (:domain ...) section");

  if (metric_section) {
    parse_metric_section(*metric_section, prob);
  } else if (!prob.soft_goals.empty()) {
    // No metric clause: unit penalties, pure penalty minimization.
    prob.metric.kind = Metric::Kind::PenaltySum;
    for (auto& g : prob.soft_goals) g.penalty = 1.0;
  } else {
    prob.metric.kind = Metric::Kind::PlanLength;
  }
  return prob;
}

std::vector<PlanStep> parse_plan_steps(std::string_view text) {
  std::vector<PlanStep> steps;
  for (const Sexpr& e : parse_sexpr_list(text)) {
    if (!e.is_list() || e.items.empty() || !e.items[0].is_symbol())
      throw ParseError("plan step must be (name args...)", e.pos);
    PlanStep step;
    step.name = e.items[0].text;
    for (std::size_t i = 1; i < e.items.size(); ++i)
      step.args.push_back(expect_symbol(e.items[i], "argument"));
    steps.push_back(std::move(step));
  }
  return steps;
}

State parse_state(std::string_view text, const Problem& prob) {
  std::vector<GroundAtom> atoms;
  for (const Sexpr& e : parse_sexpr_list(text))
    atoms.push_back(parse_ground_atom(e, prob, "state file"));
  return State(std::move(atoms));
}

}  // namespace pddl
