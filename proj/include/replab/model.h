#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace pddl {

struct Param {
  std::string name;  // "?x"
  std::string type;
  auto operator<=>(const Param&) const = default;
};

// Declared relation over typed parameters.
struct PredicateSchema {
  std::string name;
  std::vector<Param> params;
  auto operator<=>(const PredicateSchema&) const = default;
};

// Atom over schema parameters, as it appears inside an action schema.
struct SchemaLiteral {
  std::string pred;
  std::vector<std::string> args;  // parameter names
  auto operator<=>(const SchemaLiteral&) const = default;
};

struct ActionSchema {
  std::string name;
  std::vector<Param> params;
  std::vector<SchemaLiteral> precond;  // positive conjunction
  std::vector<SchemaLiteral> add;
  std::vector<SchemaLiteral> del;
  auto operator<=>(const ActionSchema&) const = default;
};

// Single-parent object-type hierarchy rooted at "object".
class TypeHierarchy {
 public:
  void declare(const std::string& type, const std::string& parent);
  bool declared(const std::string& type) const;
  // True if `type` equals `ancestor` or is a (transitive) descendant.
  bool is_subtype(const std::string& type, const std::string& ancestor) const;
  const std::map<std::string, std::string>& parents() const { return parent_; }
  bool operator==(const TypeHierarchy&) const = default;

 private:
  std::map<std::string, std::string> parent_;  // type -> parent type
};

struct Domain {
  std::string name;
  TypeHierarchy types;
  std::vector<PredicateSchema> predicates;
  std::vector<ActionSchema> actions;

  const PredicateSchema* find_predicate(const std::string& n) const;
  const ActionSchema* find_action(const std::string& n) const;
};

using DomainRef = std::shared_ptr<const Domain>;

struct GroundAtom {
  std::string pred;
  std::vector<std::string> args;  // object constants

  auto operator<=>(const GroundAtom&) const = default;
  std::string str() const;  // "(pred a b)"
};

// "(name arg1 arg2 ...)" key used for plan diffs and plan files.
std::string signature(const std::string& name, const std::vector<std::string>& args);

struct GroundAction {
  std::string name;
  std::vector<std::string> args;
  std::vector<GroundAtom> precond;  // each sorted, unique
  std::vector<GroundAtom> add;
  std::vector<GroundAtom> del;

  std::string sig() const { return signature(name, args); }
  bool operator==(const GroundAction& o) const {
    return name == o.name && args == o.args;
  }
};

// Closed-world set of ground atoms, kept sorted and duplicate-free.
class State {
 public:
  State() = default;
  explicit State(std::vector<GroundAtom> atoms);

  bool contains(const GroundAtom& a) const;
  bool contains_all(const std::vector<GroundAtom>& atoms) const;
  void add(const GroundAtom& a);
  void remove(const GroundAtom& a);

  const std::vector<GroundAtom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool operator==(const State&) const = default;

 private:
  std::vector<GroundAtom> atoms_;
};

// Goal whose non-achievement costs `penalty` instead of invalidating a plan.
struct SoftGoal {
  GroundAtom atom;
  double penalty = 1.0;  // >= 0
  std::string name;      // preference label, unique within a problem
  auto operator<=>(const SoftGoal&) const = default;
};

struct Metric {
  enum class Kind { PlanLength, PenaltySum, WeightedSum };
  Kind kind = Kind::PlanLength;
  double length_weight = 0.0;   // WeightedSum only
  double penalty_weight = 1.0;  // multiplies every soft-goal penalty
  bool operator==(const Metric&) const = default;
};

struct Object {
  std::string name;
  std::string type;
  auto operator<=>(const Object&) const = default;
};

struct Problem {
  DomainRef domain;
  std::string name;
  std::vector<Object> objects;        // insertion order
  State init;
  std::vector<GroundAtom> hard_goals; // sorted, unique
  std::vector<SoftGoal> soft_goals;
  Metric metric;

  // Type of a declared object, or nullopt.
  std::optional<std::string> object_type(const std::string& obj) const;
};

// Copy of `p` with a different initial state (same domain, objects, goals).
Problem with_init(const Problem& p, State init);

// Structural equality up to ordering of predicates/actions/objects/goals and
// metric normalization (penalty_weight folded into per-goal penalties).
bool equivalent(const Domain& a, const Domain& b);
bool equivalent(const Problem& a, const Problem& b);

struct GroundAtomHash {
  std::size_t operator()(const GroundAtom& a) const {
    std::size_t h = std::hash<std::string>{}(a.pred);
    for (const auto& s : a.args)
      h = h * 1000003u ^ std::hash<std::string>{}(s);
    return h;
  }
};

}  // namespace pddl
