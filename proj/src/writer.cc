#include "replab/writer.h"

#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "replab/sexpr.h"

namespace pddl {

namespace {

// Shortest decimal that round-trips; integers without a trailing ".0".
std::string fmt_num(double v) {
  if (v == std::floor(v) && std::fabs(v) < 1e15)
    return std::to_string(static_cast<long long>(v));
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_params(std::ostringstream& out, const std::vector<Param>& params) {
  out << '(';
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out << ' ';
    out << params[i].name << " - " << params[i].type;
  }
  out << ')';
}

void write_literal(std::ostringstream& out, const SchemaLiteral& lit) {
  out << '(' << lit.pred;
  for (const auto& a : lit.args) out << ' ' << a;
  out << ')';
}

void write_conjunction(std::ostringstream& out,
                       const std::vector<SchemaLiteral>& pos,
                       const std::vector<SchemaLiteral>& neg) {
  out << "(and";
  for (const auto& l : pos) {
    out << ' ';
    write_literal(out, l);
  }
  for (const auto& l : neg) {
    out << " (not ";
    write_literal(out, l);
    out << ')';
  }
  out << ')';
}

}  // namespace

std::string emit_domain(const Domain& dom, ProblemDialect dialect) {
  std::ostringstream out;
  out << "(define (domain " << dom.name << ")\n";
  out << "  (:requirements :strips :typing";
  if (dialect == ProblemDialect::Pddl3) out << " :preferences";
  out << ")\n";

  if (!dom.types.parents().empty()) {
    // Group subtypes under each parent; groups sorted by parent name.
    std::map<std::string, std::vector<std::string>> groups;
    for (const auto& [type, parent] : dom.types.parents())
      groups[parent].push_back(type);
    out << "  (:types";
    for (const auto& [parent, members] : groups) {
      out << "\n   ";
      for (const auto& m : members) out << ' ' << m;
      out << " - " << parent;
    }
    out << ")\n";
  }

  if (!dom.predicates.empty()) {
    out << "  (:predicates";
    for (const auto& p : dom.predicates) {
      out << "\n    (" << p.name;
      for (const auto& param : p.params)
        out << ' ' << param.name << " - " << param.type;
      out << ')';
    }
    out << ")\n";
  }

  for (const auto& a : dom.actions) {
    out << "\n  (:action " << a.name << "\n";
    out << "    :parameters ";
    write_params(out, a.params);
    out << "\n    :precondition ";
    write_conjunction(out, a.precond, {});
    out << "\n    :effect ";
    write_conjunction(out, a.add, a.del);
    out << ")\n";
  }

  out << ")\n";
  return out.str();
}

std::string emit_problem(const Problem& prob, ProblemDialect dialect) {
  if (!prob.domain)
    throw SemanticError("emit_problem: problem has no domain");
  if (dialect == ProblemDialect::Plain && !prob.soft_goals.empty())
    throw SemanticError(
        "plain dialect cannot express soft goals; use pddl3");

  std::ostringstream out;
  out << "(define (problem " << prob.name << ")\n";
  out << "  (:domain " << prob.domain->name << ")\n";

  out << "  (:objects";
  for (const auto& o : prob.objects)
    out << "\n    " << o.name << " - " << o.type;
  out << ")\n";

  out << "  (:init";
  for (const auto& atom : prob.init.atoms()) out << "\n    " << atom.str();
  out << ")\n";

  out << "  (:goal (and";
  for (const auto& g : prob.hard_goals) out << "\n    " << g.str();
  for (const auto& g : prob.soft_goals)
    out << "\n    (preference " << g.name << " " << g.atom.str() << ")";
  out << "))\n";

  // Metric. Plain plan-length problems leave it implicit; anything with
  // preferences writes the is-violated sum so penalties survive a round trip.
  const Metric& m = prob.metric;
  bool want_length = m.kind == Metric::Kind::PlanLength ||
                     m.kind == Metric::Kind::WeightedSum;
  bool want_penalties = !prob.soft_goals.empty() &&
                        m.kind != Metric::Kind::PlanLength;
  if (want_penalties || (want_length && !prob.soft_goals.empty())) {
    std::vector<std::string> terms;
    if (want_length) {
      double w = m.kind == Metric::Kind::WeightedSum ? m.length_weight : 1.0;
      terms.push_back(w == 1.0 ? "(total-time)"
                               : "(* " + fmt_num(w) + " (total-time))");
    }
    if (want_penalties) {
      for (const auto& g : prob.soft_goals) {
        double w = g.penalty * m.penalty_weight;
        std::string viol = "(is-violated " + g.name + ")";
        terms.push_back(w == 1.0 ? viol : "(* " + fmt_num(w) + " " + viol + ")");
      }
    }
    out << "  (:metric minimize ";
    if (terms.size() == 1) {
      out << terms[0];
    } else {
      out << "(+";
      for (const auto& t : terms) out << ' ' << t;
      out << ')';
    }
    out << ")\n";
  }

  out << ")\n";
  return out.str();
}

std::string emit_plan(const plans::Plan& plan) {
  std::ostringstream out;
  for (const auto& a : plan) out << a.sig() << '\n';
  return out.str();
}

std::string emit_state(const State& state) {
  std::ostringstream out;
  for (const auto& atom : state.atoms()) out << atom.str() << '\n';
  return out.str();
}

}  // namespace pddl
