#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "replab/model.h"
#include "replab/plan_model.h"
#include "replab/solver.h"

namespace wh {

// Object counts for one benchmark instance. The growth rules keep instances
// feasible while everything scales with the package count; the tow truck,
// garage and packager stay at one each.
struct InstanceSpec {
  int num_packages = 1;
  std::uint64_t seed = 0;
  int forklifts = 2;
  int transports = 1;
  int shelves = 1;
  int gridsquares = 6;
  int tow_trucks = 1;
  int garages = 1;
  int packagers = 1;

  static InstanceSpec for_packages(int n, std::uint64_t seed);
};

// The fixed domain: forklifts pull packages off shelves and hand them to
// transports, transports deliver to a packager, tow trucks haul broken
// carriers to a garage for repair. Parsed once, shared.
pddl::DomainRef warehouse_domain();

// Predicates other agents are taken to depend on: {holding, on, towing,
// delivered}.
const std::vector<std::string>& commitment_predicates();

// Random instance: connected gridsquare graph (spanning tree plus extra
// edges), shelves on random squares, packages stocked, carriers placed and
// operational, one garage square, one packager; goal packaged(p) for every
// package. Deterministic in spec.seed.
pddl::Problem generate_instance(const InstanceSpec& spec);

struct Perturbation {
  enum class Kind { PackageFalls, CarrierBreaks };
  Kind kind = Kind::PackageFalls;
  std::size_t prefix_len = 0;  // steps of the old plan already executed
  std::string package;         // PackageFalls
  std::string gridsquare;      // PackageFalls: where it lands
  std::string carrier;         // the carrier that dropped it or broke down
};

struct UnperturbableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Strikes the plan mid-execution: picks a prefix length in [1, |plan|-1] and
// a target, mutates the prefix-end state, and redraws while the untouched
// suffix would still run to the goals (those cases need no replanning).
// Throws UnperturbableError when the retry budget runs out.
std::pair<Perturbation, pddl::State> perturb(const pddl::Problem& prob,
                                             const plans::Plan& plan,
                                             Perturbation::Kind kind,
                                             std::uint64_t seed,
                                             int max_retries = 64);

// One replayable replanning episode.
struct Scenario {
  InstanceSpec spec;
  std::string instance;  // id, matches problem.name
  pddl::Problem problem;
  plans::Plan plan;  // the plan the perturbation interrupts
  Perturbation perturbation;
  pddl::State perturbed_init;  // I'
};

// Generates, solves and perturbs one instance. The perturbation stream is
// derived from spec.seed, so (spec, kind) fully determines the scenario.
Scenario make_scenario(const InstanceSpec& spec, Perturbation::Kind kind,
                       const search::PlannerConfig& plan_cfg);

std::string scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const std::string& text);

}  // namespace wh
