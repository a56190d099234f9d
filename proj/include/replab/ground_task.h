#pragma once

#include <cstdint>
#include <cstddef>
#include <limits>
#include <unordered_map>
#include <vector>

#include "replab/grounding.h"
#include "replab/model.h"

namespace search {

// Fixed-width bitset sized for one task's fact universe.
class Bits {
 public:
  Bits() = default;
  explicit Bits(std::size_t nbits) : words_((nbits + 63) / 64, 0) {}

  void set(int i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(int i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  bool test(int i) const {
    return (words_[i >> 6] >> (i & 63)) & 1;
  }
  bool operator==(const Bits&) const = default;
  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  std::vector<std::uint64_t> words_;
};

struct BitsHash {
  std::size_t operator()(const Bits& b) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (std::uint64_t w : b.words()) {
      h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

// A problem lowered to integer fact and action ids for search. Soft-goal
// atoms that no action adds and init lacks cannot ever be satisfied; their
// penalties are folded into `stuck_soft_penalty` and charged to every plan.
struct GroundTask {
  struct Action {
    std::vector<int> pre, add, del;  // fact ids, sorted
  };
  struct SoftFact {
    int fact = -1;
    double penalty = 0;
    std::size_t goal_index = 0;  // into the source problem's soft_goals
  };

  std::vector<pddl::GroundAtom> facts;  // id -> atom
  std::vector<Action> actions;
  std::vector<pddl::GroundAction> ground_actions;  // parallel to actions
  std::vector<std::vector<int>> watchers;  // fact id -> actions with it as pre
  std::vector<int> no_precond_actions;
  std::vector<int> hard_goals;  // fact ids; -1 never appears (see build)
  bool hard_goal_missing = false;  // a hard goal atom outside the universe
  std::vector<SoftFact> soft;
  double stuck_soft_penalty = 0;
  double penalty_weight = 1.0;
  Bits init;

  std::size_t fact_count() const { return facts.size(); }

  Bits state_bits(const pddl::State& s) const;
  pddl::State to_state(const Bits& b) const;

  // End-state penalty: soft facts unset in `b` plus the stuck share.
  double end_penalty(const Bits& b) const;

  static GroundTask build(const pddl::Problem& prob);
};

constexpr int kUnreachable = std::numeric_limits<int>::max();

// Reusable delete-relaxation exploration from an arbitrary state: fact
// levels, first achievers, h_max and FF-style relaxed-plan extraction.
class RelaxedExploration {
 public:
  explicit RelaxedExploration(const GroundTask& task);

  void run(const Bits& state);

  int level(int fact) const { return fact_level_[fact]; }
  bool reachable(int fact) const { return fact_level_[fact] != kUnreachable; }

  // Max goal level, or kUnreachable if any goal is unreachable.
  int hmax(const std::vector<int>& goals) const;

  // Number of distinct actions in an extracted relaxed plan covering
  // `goals`; every goal must be reachable from the last run() state.
  int relaxed_plan_size(const std::vector<int>& goals);

 private:
  const GroundTask& task_;
  std::vector<int> fact_level_;
  std::vector<int> achiever_;  // action that first added the fact, -1 = init
  std::vector<int> unmet_;     // per-action outstanding preconds this run
  std::vector<int> queue_;     // scratch
  std::vector<char> fact_marked_, action_marked_;  // relaxed-plan scratch
};

}  // namespace search
