#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "replab/model.h"
#include "replab/sexpr.h"

namespace pddl {

// Parses a domain in the typed-STRIPS fragment (see docs/pddl-grammar.ebnf).
// Throws ParseError on malformed input, SemanticError on well-formed input
// that violates the fragment (unknown type, arity mismatch, duplicate name,
// add/del overlap, ...).
Domain parse_domain(std::string_view text);

// Parses a problem against an already-parsed domain. `(preference ...)` goal
// entries become soft goals; a `(:metric minimize ...)` clause selects the
// metric and supplies per-preference penalties. With preferences present and
// no metric clause, every penalty defaults to 1.
Problem parse_problem(std::string_view text, DomainRef domain);

// One plan step as written in a plan file: name plus argument constants.
struct PlanStep {
  std::string name;
  std::vector<std::string> args;
};

// Plan file format: one `(name arg1 arg2 ...)` per line, `;` comments.
std::vector<PlanStep> parse_plan_steps(std::string_view text);

// State file format: one `(pred arg1 ...)` per line, `;` comments.
// Atoms are checked against the problem's domain and objects.
State parse_state(std::string_view text, const Problem& prob);

}  // namespace pddl
