#include "replab/warehouses.h"

#include <algorithm>
#include <cstdio>
#include <mutex>
#include <set>
#include <sstream>

#include <json.hpp>

#include "replab/grounding.h"
#include "replab/parser.h"
#include "replab/rng.h"

namespace wh {

using json = nlohmann::ordered_json;

namespace {

const char kDomainText[] = R"PDDL(
(define (domain warehouses)
  (:requirements :strips :typing)
  (:types
    carrier package shelf gridsquare garage packager - object
    forklift transport towtruck - carrier)
  (:predicates
    (connected ?a - gridsquare ?b - gridsquare)
    (at ?c - carrier ?g - gridsquare)
    (accessible ?s - shelf ?g - gridsquare)
    (stocked ?p - package ?s - shelf)
    (holding ?f - forklift ?p - package)
    (on ?p - package ?t - transport)
    (fallen ?p - package ?g - gridsquare)
    (operational ?c - carrier)
    (broken ?c - carrier)
    (towing ?w - towtruck ?c - carrier)
    (at-garage ?g - gridsquare)
    (delivered ?p - package ?k - packager)
    (packaged ?p - package)
    (packager-at ?k - packager ?g - gridsquare))

  (:action move-carrier
    :parameters (?c - carrier ?from - gridsquare ?to - gridsquare)
    :precondition (and (at ?c ?from) (connected ?from ?to) (operational ?c))
    :effect (and (at ?c ?to) (not (at ?c ?from))))

  (:action unstock
    :parameters (?f - forklift ?p - package ?s - shelf ?g - gridsquare)
    :precondition (and (at ?f ?g) (accessible ?s ?g) (stocked ?p ?s)
                       (operational ?f))
    :effect (and (holding ?f ?p) (not (stocked ?p ?s))))

  (:action stock
    :parameters (?f - forklift ?p - package ?s - shelf ?g - gridsquare)
    :precondition (and (at ?f ?g) (accessible ?s ?g) (holding ?f ?p)
                       (operational ?f))
    :effect (and (stocked ?p ?s) (not (holding ?f ?p))))

  (:action load
    :parameters (?f - forklift ?t - transport ?p - package ?g - gridsquare)
    :precondition (and (at ?f ?g) (at ?t ?g) (holding ?f ?p)
                       (operational ?f) (operational ?t))
    :effect (and (on ?p ?t) (not (holding ?f ?p))))

  (:action unload
    :parameters (?f - forklift ?t - transport ?p - package ?g - gridsquare)
    :precondition (and (at ?f ?g) (at ?t ?g) (on ?p ?t)
                       (operational ?f) (operational ?t))
    :effect (and (holding ?f ?p) (not (on ?p ?t))))

  (:action pickup-fallen
    :parameters (?f - forklift ?p - package ?g - gridsquare)
    :precondition (and (at ?f ?g) (fallen ?p ?g) (operational ?f))
    :effect (and (holding ?f ?p) (not (fallen ?p ?g))))

  (:action deliver
    :parameters (?t - transport ?p - package ?k - packager ?g - gridsquare)
    :precondition (and (at ?t ?g) (packager-at ?k ?g) (on ?p ?t)
                       (operational ?t))
    :effect (and (delivered ?p ?k) (not (on ?p ?t))))

  (:action package
    :parameters (?p - package ?k - packager)
    :precondition (and (delivered ?p ?k))
    :effect (and (packaged ?p)))

  (:action tow-attach
    :parameters (?w - towtruck ?c - carrier ?g - gridsquare)
    :precondition (and (at ?w ?g) (at ?c ?g) (broken ?c) (operational ?w))
    :effect (and (towing ?w ?c)))

  (:action tow-move
    :parameters (?w - towtruck ?c - carrier ?from - gridsquare
                 ?to - gridsquare)
    :precondition (and (towing ?w ?c) (at ?w ?from) (at ?c ?from)
                       (connected ?from ?to) (operational ?w))
    :effect (and (at ?w ?to) (at ?c ?to)
                 (not (at ?w ?from)) (not (at ?c ?from))))

  (:action tow-detach-repair
    :parameters (?w - towtruck ?c - carrier ?g - gridsquare)
    :precondition (and (towing ?w ?c) (at ?w ?g) (at ?c ?g) (at-garage ?g))
    :effect (and (operational ?c) (not (towing ?w ?c)) (not (broken ?c))))
)
)PDDL";

// Fraction of extra edges layered over the spanning tree.
constexpr double kExtraEdgeFraction = 0.25;

pddl::GroundAtom atom(std::string pred, std::vector<std::string> args) {
  return pddl::GroundAtom{std::move(pred), std::move(args)};
}

std::string numbered(const char* stem, int i) {
  return std::string(stem) + std::to_string(i);
}

// Where is this carrier in state s?
std::string carrier_square(const pddl::State& s, const std::string& carrier) {
  for (const auto& a : s.atoms())
    if (a.pred == "at" && a.args[0] == carrier) return a.args[1];
  return {};
}

bool is_carrier(const pddl::Problem& prob, const std::string& obj) {
  auto type = prob.object_type(obj);
  return type && prob.domain->types.is_subtype(*type, "carrier");
}

// Would the rest of the old plan still reach the goals from s?
bool suffix_still_works(const pddl::Problem& prob, const pddl::State& s,
                        const plans::Plan& plan, std::size_t prefix_len) {
  plans::Plan suffix(plan.begin() + prefix_len, plan.end());
  try {
    auto trace = plans::simulate(s, suffix);
    return trace.back().contains_all(prob.hard_goals);
  } catch (const plans::SimulationError&) {
    return false;
  }
}

}  // namespace

InstanceSpec InstanceSpec::for_packages(int n, std::uint64_t seed) {
  InstanceSpec spec;
  spec.num_packages = n;
  spec.seed = seed;
  spec.forklifts = (n + 1) / 2 + 1;
  spec.transports = (n + 1) / 2;
  spec.shelves = n;
  spec.gridsquares = 2 * n + 4;
  spec.tow_trucks = 1;
  spec.garages = 1;
  spec.packagers = 1;
  return spec;
}

pddl::DomainRef warehouse_domain() {
  static std::once_flag once;
  static pddl::DomainRef dom;
  std::call_once(once, [] {
    dom = std::make_shared<const pddl::Domain>(pddl::parse_domain(kDomainText));
  });
  return dom;
}

const std::vector<std::string>& commitment_predicates() {
  static const std::vector<std::string> preds = {"holding", "on", "towing",
                                                 "delivered"};
  return preds;
}

pddl::Problem generate_instance(const InstanceSpec& spec) {
  util::Rng rng(spec.seed);
  pddl::Problem prob;
  prob.domain = warehouse_domain();

  char name[64];
  std::snprintf(name, sizeof name, "wh-n%02d-s%llu", spec.num_packages,
                static_cast<unsigned long long>(spec.seed));
  prob.name = name;

  std::vector<std::string> squares, forklifts, transports, packages, shelves;
  for (int i = 1; i <= spec.forklifts; ++i)
    forklifts.push_back(numbered("f", i));
  for (int i = 1; i <= spec.transports; ++i)
    transports.push_back(numbered("t", i));
  for (int i = 1; i <= spec.num_packages; ++i)
    packages.push_back(numbered("p", i));
  for (int i = 1; i <= spec.shelves; ++i) shelves.push_back(numbered("s", i));
  for (int i = 1; i <= spec.gridsquares; ++i)
    squares.push_back(numbered("g", i));

  for (const auto& o : forklifts) prob.objects.push_back({o, "forklift"});
  for (const auto& o : transports) prob.objects.push_back({o, "transport"});
  prob.objects.push_back({"tt1", "towtruck"});
  for (const auto& o : packages) prob.objects.push_back({o, "package"});
  for (const auto& o : shelves) prob.objects.push_back({o, "shelf"});
  for (const auto& o : squares) prob.objects.push_back({o, "gridsquare"});
  prob.objects.push_back({"garage1", "garage"});
  prob.objects.push_back({"pk1", "packager"});

  std::vector<pddl::GroundAtom> init;
  auto connect = [&](const std::string& a, const std::string& b) {
    init.push_back(atom("connected", {a, b}));
    init.push_back(atom("connected", {b, a}));
  };

  // Random spanning tree, then a few chords.
  std::set<std::pair<int, int>> edges;
  for (int i = 1; i < spec.gridsquares; ++i) {
    int j = static_cast<int>(rng.below(i));
    edges.insert({j, i});
    connect(squares[j], squares[i]);
  }
  int extra = static_cast<int>(kExtraEdgeFraction * spec.gridsquares);
  for (int k = 0; k < extra; ++k) {
    for (int attempt = 0; attempt < 10; ++attempt) {
      int a = static_cast<int>(rng.below(spec.gridsquares));
      int b = static_cast<int>(rng.below(spec.gridsquares));
      if (a == b) continue;
      auto e = std::minmax(a, b);
      if (!edges.insert({e.first, e.second}).second) continue;
      connect(squares[e.first], squares[e.second]);
      break;
    }
  }

  for (const auto& s : shelves)
    init.push_back(atom("accessible", {s, rng.pick(squares)}));
  for (const auto& p : packages)
    init.push_back(atom("stocked", {p, rng.pick(shelves)}));

  auto place_carrier = [&](const std::string& c) {
    init.push_back(atom("at", {c, rng.pick(squares)}));
    init.push_back(atom("operational", {c}));
  };
  for (const auto& f : forklifts) place_carrier(f);
  for (const auto& t : transports) place_carrier(t);
  place_carrier("tt1");

  init.push_back(atom("at-garage", {rng.pick(squares)}));
  init.push_back(atom("packager-at", {"pk1", rng.pick(squares)}));

  prob.init = pddl::State(std::move(init));
  for (const auto& p : packages)
    prob.hard_goals.push_back(atom("packaged", {p}));
  std::sort(prob.hard_goals.begin(), prob.hard_goals.end());
  prob.metric.kind = pddl::Metric::Kind::PlanLength;
  return prob;
}

std::pair<Perturbation, pddl::State> perturb(const pddl::Problem& prob,
                                             const plans::Plan& plan,
                                             Perturbation::Kind kind,
                                             std::uint64_t seed,
                                             int max_retries) {
  if (plan.size() < 2)
    throw UnperturbableError(
        "plan too short to interrupt mid-execution");
  auto trace = plans::simulate(prob.init, plan);
  util::Rng rng(seed);

  for (int attempt = 0; attempt < max_retries; ++attempt) {
    std::size_t prefix_len = 1 + rng.below(plan.size() - 1);
    const pddl::State& s = trace[prefix_len];

    Perturbation pert;
    pert.kind = kind;
    pert.prefix_len = prefix_len;
    pddl::State mutated = s;

    if (kind == Perturbation::Kind::PackageFalls) {
      // Packages in someone's care right now, with that carrier's square.
      struct Carried {
        pddl::GroundAtom link;  // the holding/on atom to delete
        std::string package, carrier;
      };
      std::vector<Carried> carried;
      for (const auto& a : s.atoms()) {
        if (a.pred == "holding")
          carried.push_back({a, a.args[1], a.args[0]});
        else if (a.pred == "on")
          carried.push_back({a, a.args[0], a.args[1]});
      }
      if (carried.empty()) continue;
      const Carried& pick = carried[rng.below(carried.size())];
      std::string square = carrier_square(s, pick.carrier);
      if (square.empty()) continue;
      pert.package = pick.package;
      pert.carrier = pick.carrier;
      pert.gridsquare = square;
      mutated.remove(pick.link);
      mutated.add(atom("fallen", {pick.package, square}));
    } else {
      // Operational carriers the rest of the plan still relies on.
      std::set<std::string> used;
      for (std::size_t i = prefix_len; i < plan.size(); ++i)
        for (const auto& arg : plan[i].args)
          if (is_carrier(prob, arg)) used.insert(arg);
      std::vector<std::string> eligible;
      for (const auto& c : used)
        if (s.contains(atom("operational", {c}))) eligible.push_back(c);
      if (eligible.empty()) continue;
      pert.carrier = eligible[rng.below(eligible.size())];
      mutated.remove(atom("operational", {pert.carrier}));
      mutated.add(atom("broken", {pert.carrier}));
    }

    // A perturbation the old plan shrugs off needs no replanning; redraw.
    if (suffix_still_works(prob, mutated, plan, prefix_len)) continue;
    return {pert, std::move(mutated)};
  }
  throw UnperturbableError("no invalidating perturbation found for " +
                           prob.name);
}

Scenario make_scenario(const InstanceSpec& spec, Perturbation::Kind kind,
                       const search::PlannerConfig& plan_cfg) {
  Scenario sc;
  sc.spec = spec;
  sc.problem = generate_instance(spec);
  sc.instance = sc.problem.name;

  search::PlanResult res = search::solve(sc.problem, plan_cfg);
  if (!res.plan)
    throw std::runtime_error("no plan for " + sc.problem.name +
                             " (status " +
                             std::string(search::to_string(res.status)) + ")");
  sc.plan = *res.plan;

  auto [pert, init] = perturb(sc.problem, sc.plan, kind,
                              util::derive_seed(spec.seed, 0x70657274));
  sc.perturbation = pert;
  sc.perturbed_init = std::move(init);
  return sc;
}

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["instance"] = s.instance;
  j["num_packages"] = s.spec.num_packages;
  j["seed"] = s.spec.seed;
  json plan = json::array();
  for (const auto& a : s.plan) plan.push_back(a.sig());
  j["plan"] = plan;
  json pert;
  pert["kind"] = s.perturbation.kind == Perturbation::Kind::PackageFalls
                     ? "fall"
                     : "breakdown";
  pert["prefix_len"] = s.perturbation.prefix_len;
  pert["carrier"] = s.perturbation.carrier;
  if (s.perturbation.kind == Perturbation::Kind::PackageFalls) {
    pert["package"] = s.perturbation.package;
    pert["gridsquare"] = s.perturbation.gridsquare;
  }
  j["perturbation"] = pert;
  json init = json::array();
  for (const auto& a : s.perturbed_init.atoms()) init.push_back(a.str());
  j["perturbed_init"] = init;
  return j.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
  json j = json::parse(text);
  Scenario sc;
  sc.spec = InstanceSpec::for_packages(j.at("num_packages").get<int>(),
                                       j.at("seed").get<std::uint64_t>());
  sc.problem = generate_instance(sc.spec);
  sc.instance = j.at("instance").get<std::string>();
  if (sc.instance != sc.problem.name)
    throw std::runtime_error("scenario instance id '" + sc.instance +
                             "' does not match its spec");

  for (const auto& step : j.at("plan")) {
    auto parsed = pddl::parse_plan_steps(step.get<std::string>());
    for (auto& st : parsed)
      sc.plan.push_back(pddl::resolve_step(sc.problem, st.name, st.args));
  }

  const json& pert = j.at("perturbation");
  sc.perturbation.kind = pert.at("kind").get<std::string>() == "fall"
                             ? Perturbation::Kind::PackageFalls
                             : Perturbation::Kind::CarrierBreaks;
  sc.perturbation.prefix_len = pert.at("prefix_len").get<std::size_t>();
  sc.perturbation.carrier = pert.at("carrier").get<std::string>();
  if (sc.perturbation.kind == Perturbation::Kind::PackageFalls) {
    sc.perturbation.package = pert.at("package").get<std::string>();
    sc.perturbation.gridsquare = pert.at("gridsquare").get<std::string>();
  }

  std::ostringstream init_text;
  for (const auto& a : j.at("perturbed_init"))
    init_text << a.get<std::string>() << "\n";
  sc.perturbed_init = pddl::parse_state(init_text.str(), sc.problem);
  return sc;
}

}  // namespace wh
