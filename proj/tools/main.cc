#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "replab/compilation.h"
#include "replab/constraints.h"
#include "replab/external_solver.h"
#include "replab/grounding.h"
#include "replab/harness.h"
#include "replab/parser.h"
#include "replab/plan_model.h"
#include "replab/solver.h"
#include "replab/warehouses.h"
#include "replab/writer.h"

namespace {

namespace fs = std::filesystem;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

pddl::Problem load_problem(const std::string& domain_path,
                           const std::string& problem_path) {
  auto dom = std::make_shared<const pddl::Domain>(
      pddl::parse_domain(slurp(domain_path)));
  return pddl::parse_problem(slurp(problem_path), dom);
}

plans::Plan load_plan(const std::string& path, const pddl::Problem& prob) {
  plans::Plan plan;
  for (const auto& step : pddl::parse_plan_steps(slurp(path)))
    plan.push_back(pddl::resolve_step(prob, step.name, step.args));
  return plan;
}

struct SolverChoice {
  bool external = false;
  std::string command;
};

SolverChoice parse_solver(const std::string& spec) {
  if (spec == "embedded") return {};
  if (spec.rfind("external:", 0) == 0) {
    SolverChoice c;
    c.external = true;
    c.command = spec.substr(9);
    if (c.command.empty())
      throw CLI::ValidationError("--solver", "external: needs a command");
    return c;
  }
  throw CLI::ValidationError("--solver",
                             "expected 'embedded' or 'external:<command>'");
}

search::PlanResult dispatch_solve(const pddl::Problem& prob,
                                  const SolverChoice& solver,
                                  const search::PlannerConfig& cfg) {
  if (solver.external)
    return search::solve_external(prob, solver.command, cfg.time_budget_s,
                                  cfg.length_weight);
  return search::solve(prob, cfg);
}

void print_result(const search::PlanResult& res) {
  std::printf("status: %s\n", search::to_string(res.status));
  std::printf("time_ms: %.1f\n", res.wall_time_ms);
  std::printf("nodes_expanded: %zu\n", res.nodes_expanded);
  if (res.plan) {
    std::printf("plan_length: %zu\n", res.plan_length);
    std::printf("penalty_sum: %g\n", res.penalty_sum);
    std::printf("objective: %g\n", res.objective);
  }
}

psp::ReplanModel parse_model(const std::string& name) {
  if (name == "restart") return psp::ReplanModel::M1_Restart;
  if (name == "similarity") return psp::ReplanModel::M2_Similarity;
  if (name == "commitment") return psp::ReplanModel::M3_Commitment;
  throw CLI::ValidationError("--model", "expected restart|similarity|commitment");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"replab: a replanning laboratory over a PSP substrate"};
  app.require_subcommand(1);

  // gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate a Warehouses instance");
  int gen_packages = 1;
  std::uint64_t gen_seed = 1;
  std::string gen_out = ".";
  std::string gen_perturb = "fall";
  bool gen_no_scenario = false;
  double gen_budget = 120.0;
  gen->add_option("--packages", gen_packages, "package count (1..12)")
      ->check(CLI::Range(1, 12));
  gen->add_option("--seed", gen_seed, "instance seed");
  gen->add_option("--out", gen_out, "output directory");
  gen->add_option("--perturb", gen_perturb, "fall|breakdown")
      ->check(CLI::IsMember({"fall", "breakdown"}));
  gen->add_flag("--no-scenario", gen_no_scenario,
                "emit only domain and problem files");
  gen->add_option("--budget", gen_budget,
                  "seconds for solving the base instance");

  // plan ---------------------------------------------------------------
  auto* plan_cmd = app.add_subcommand("plan", "solve a problem");
  std::string plan_domain, plan_problem, plan_out;
  std::string plan_solver = "embedded";
  search::PlannerConfig plan_cfg;
  bool plan_first = false;
  std::string plan_heur = "relaxed-plan", plan_soft = "optimistic";
  plan_cmd->add_option("--domain", plan_domain)->required();
  plan_cmd->add_option("--problem", plan_problem)->required();
  plan_cmd->add_option("--out", plan_out, "plan file to write");
  plan_cmd->add_option("--solver", plan_solver,
                       "embedded | external:<command template>");
  plan_cmd->add_option("--budget", plan_cfg.time_budget_s, "seconds");
  plan_cmd->add_option("--node-budget", plan_cfg.node_budget);
  plan_cmd->add_option("--w-len", plan_cfg.length_weight);
  plan_cmd->add_flag("--first", plan_first, "stop at the first plan");
  plan_cmd->add_option("--heuristic", plan_heur, "relaxed-plan|goal-count")
      ->check(CLI::IsMember({"relaxed-plan", "goal-count"}));
  plan_cmd->add_option("--soft-mode", plan_soft, "optimistic|pessimistic")
      ->check(CLI::IsMember({"optimistic", "pessimistic"}));

  // replan -------------------------------------------------------------
  auto* replan = app.add_subcommand("replan", "replan a perturbed scenario");
  std::string rp_scenario, rp_domain, rp_problem, rp_plan, rp_state, rp_out;
  std::string rp_model = "restart", rp_scope = "suffix";
  std::string rp_solver = "embedded";
  std::vector<std::string> rp_preds;
  std::size_t rp_prefix = 0;
  double rp_budget = 60.0;
  replan->add_option("--scenario", rp_scenario, "scenario JSON file");
  replan->add_option("--domain", rp_domain);
  replan->add_option("--problem", rp_problem, "the original problem");
  replan->add_option("--plan", rp_plan, "the interrupted plan");
  replan->add_option("--state", rp_state, "perturbed state file (I')");
  replan->add_option("--prefix-len", rp_prefix, "steps already executed");
  replan->add_option("--model", rp_model, "restart|similarity|commitment");
  replan->add_option("--scope", rp_scope, "suffix|full")
      ->check(CLI::IsMember({"suffix", "full"}));
  replan->add_option("--commitment-preds", rp_preds,
                     "commitment-relevant predicates")
      ->delimiter(',');
  replan->add_option("--budget", rp_budget, "seconds");
  replan->add_option("--solver", rp_solver);
  replan->add_option("--out", rp_out, "new plan file to write");

  // compile ------------------------------------------------------------
  auto* compile_cmd =
      app.add_subcommand("compile", "compile a replanning model to PDDL3");
  std::string cm_domain, cm_problem, cm_plan, cm_state;
  std::string cm_model = "similarity", cm_scope = "suffix";
  std::string cm_out_domain = "compiled-domain.pddl";
  std::string cm_out_problem = "compiled-problem.pddl";
  std::vector<std::string> cm_preds;
  std::size_t cm_prefix = 0;
  bool cm_replace = false;
  compile_cmd->add_option("--domain", cm_domain)->required();
  compile_cmd->add_option("--problem", cm_problem)->required();
  compile_cmd->add_option("--plan", cm_plan)->required();
  compile_cmd->add_option("--state", cm_state, "perturbed state file (I')")
      ->required();
  compile_cmd->add_option("--prefix-len", cm_prefix);
  compile_cmd->add_option("--model", cm_model);
  compile_cmd->add_option("--scope", cm_scope)
      ->check(CLI::IsMember({"suffix", "full"}));
  compile_cmd->add_option("--commitment-preds", cm_preds)->delimiter(',');
  compile_cmd->add_flag("--replace-originals", cm_replace,
                        "swap instrumented copies in for the originals");
  compile_cmd->add_option("--out-domain", cm_out_domain);
  compile_cmd->add_option("--out-problem", cm_out_problem);

  // simulate -----------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "execute a plan and validate it");
  std::string sm_domain, sm_problem, sm_plan;
  bool sm_trace = false;
  sim->add_option("--domain", sm_domain)->required();
  sim->add_option("--problem", sm_problem)->required();
  sim->add_option("--plan", sm_plan)->required();
  sim->add_flag("--trace", sm_trace, "print every intermediate state");

  // diff ---------------------------------------------------------------
  auto* diff = app.add_subcommand("diff", "plan difference metrics");
  std::string df_old, df_new;
  bool df_multiset = false;
  diff->add_option("--old", df_old)->required();
  diff->add_option("--new", df_new)->required();
  diff->add_flag("--multiset", df_multiset, "count duplicate actions");

  // bench --------------------------------------------------------------
  auto* bench_cmd = app.add_subcommand("bench", "run the full experiment");
  bench::BenchConfig bc;
  std::string bn_out = "bench.csv", bn_scope = "suffix";
  std::string bn_solver = "embedded", bn_config;
  bool bn_quiet = false;
  bench_cmd->add_option("--config", bn_config, "JSON config file");
  auto* o_out = bench_cmd->add_option("--out", bn_out, "CSV path");
  auto* o_min = bench_cmd->add_option("--min-packages", bc.min_packages);
  auto* o_max = bench_cmd->add_option("--max-packages", bc.max_packages);
  auto* o_seeds = bench_cmd->add_option("--seeds", bc.seeds_per_size,
                                        "instances per size");
  auto* o_base = bench_cmd->add_option("--base-seed", bc.base_seed);
  auto* o_budget = bench_cmd->add_option("--budget", bc.budget_s,
                                         "seconds per replanning run");
  auto* o_jobs = bench_cmd->add_option("--jobs", bc.jobs, "worker threads");
  auto* o_scope = bench_cmd->add_option("--scope", bn_scope, "suffix|full")
                      ->check(CLI::IsMember({"suffix", "full"}));
  auto* o_multi = bench_cmd->add_flag("--multiset", bc.multiset_diffs);
  auto* o_solver = bench_cmd->add_option("--solver", bn_solver);
  bench_cmd->add_flag("--quiet", bn_quiet, "no per-run progress on stderr");

  // plot ---------------------------------------------------------------
  auto* plot = app.add_subcommand("plot", "emit plot data and scripts");
  std::string pl_csv, pl_out = "plots";
  plot->add_option("--csv", pl_csv)->required();
  plot->add_option("--out", pl_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      fs::create_directories(gen_out);
      auto spec = wh::InstanceSpec::for_packages(gen_packages, gen_seed);
      pddl::Problem prob = wh::generate_instance(spec);
      spit(gen_out + "/domain.pddl", pddl::emit_domain(*prob.domain));
      spit(gen_out + "/" + prob.name + ".pddl",
           pddl::emit_problem(prob, pddl::ProblemDialect::Plain));
      std::printf("wrote %s/%s.pddl\n", gen_out.c_str(), prob.name.c_str());
      if (!gen_no_scenario) {
        search::PlannerConfig cfg;
        cfg.anytime = false;
        cfg.time_budget_s = gen_budget;
        auto kind = gen_perturb == "fall" ? wh::Perturbation::Kind::PackageFalls
                                          : wh::Perturbation::Kind::CarrierBreaks;
        wh::Scenario sc = wh::make_scenario(spec, kind, cfg);
        spit(gen_out + "/" + prob.name + ".scenario.json",
             wh::scenario_to_json(sc));
        std::printf("wrote %s/%s.scenario.json (plan length %zu, %s at %zu)\n",
                    gen_out.c_str(), prob.name.c_str(), sc.plan.size(),
                    gen_perturb.c_str(), sc.perturbation.prefix_len);
      }
    } else if (*plan_cmd) {
      pddl::Problem prob = load_problem(plan_domain, plan_problem);
      plan_cfg.anytime = !plan_first;
      plan_cfg.heuristic = plan_heur == "goal-count"
                               ? search::Heuristic::GoalCount
                               : search::Heuristic::RelaxedPlan;
      plan_cfg.soft_mode = plan_soft == "pessimistic"
                               ? search::SoftGoalMode::Pessimistic
                               : search::SoftGoalMode::Optimistic;
      auto res = dispatch_solve(prob, parse_solver(plan_solver), plan_cfg);
      print_result(res);
      if (res.plan && !plan_out.empty())
        spit(plan_out, pddl::emit_plan(*res.plan));
      if (!res.plan) return 1;
    } else if (*replan) {
      pddl::Problem original;
      plans::Plan old_plan;
      pddl::State perturbed_init;
      std::size_t prefix_len = rp_prefix;
      std::vector<std::string> preds = rp_preds;
      if (!rp_scenario.empty()) {
        wh::Scenario sc = wh::scenario_from_json(slurp(rp_scenario));
        original = sc.problem;
        old_plan = sc.plan;
        perturbed_init = sc.perturbed_init;
        prefix_len = sc.perturbation.prefix_len;
        if (preds.empty()) preds = wh::commitment_predicates();
      } else {
        if (rp_domain.empty() || rp_problem.empty() || rp_plan.empty() ||
            rp_state.empty())
          throw std::runtime_error(
              "replan needs --scenario or all of --domain --problem --plan "
              "--state");
        original = load_problem(rp_domain, rp_problem);
        old_plan = load_plan(rp_plan, original);
        perturbed_init = pddl::parse_state(slurp(rp_state), original);
      }
      auto scope = rp_scope == "full" ? psp::ConstraintScope::Full
                                      : psp::ConstraintScope::Suffix;
      auto cs = psp::build_constraints(parse_model(rp_model), original,
                                       old_plan, prefix_len, preds, scope);
      psp::CompileOptions copts;
      copts.replace_originals = true;
      auto cp = psp::compile(pddl::with_init(original, perturbed_init), cs,
                             copts);
      search::PlannerConfig cfg;
      cfg.time_budget_s = rp_budget;
      if (rp_model == "restart") {
        cfg.anytime = false;
      } else {
        cfg.soft_mode = search::SoftGoalMode::Pessimistic;
      }
      auto res = dispatch_solve(psp::to_preferences(cp),
                                parse_solver(rp_solver), cfg);
      print_result(res);
      if (!res.plan) return 1;
      plans::Plan replanned = psp::strip_instrumentation(cp, *res.plan);
      plans::Plan scope_old(old_plan.begin() +
                                (scope == psp::ConstraintScope::Suffix
                                     ? static_cast<std::ptrdiff_t>(prefix_len)
                                     : 0),
                            old_plan.end());
      auto d = plans::plan_diff(scope_old, replanned);
      std::printf("set_diff: %zu\nsym_diff: %zu\n", d.set_diff, d.sym_diff);
      if (!preds.empty()) {
        auto commitments = plans::extract_commitments(original, old_plan, preds);
        auto trace = plans::simulate(perturbed_init, replanned);
        std::size_t honored = 0;
        for (const auto& c : commitments)
          for (const auto& s : trace)
            if (s.contains(c)) {
              ++honored;
              break;
            }
        std::printf("violations: %zu\n", commitments.size() - honored);
      }
      for (const auto& a : replanned) std::printf("%s\n", a.sig().c_str());
      if (!rp_out.empty()) spit(rp_out, pddl::emit_plan(replanned));
    } else if (*compile_cmd) {
      pddl::Problem original = load_problem(cm_domain, cm_problem);
      plans::Plan old_plan = load_plan(cm_plan, original);
      pddl::State perturbed_init =
          pddl::parse_state(slurp(cm_state), original);
      std::vector<std::string> preds = cm_preds;
      if (preds.empty() && cm_model == "commitment")
        preds = wh::commitment_predicates();
      auto scope = cm_scope == "full" ? psp::ConstraintScope::Full
                                      : psp::ConstraintScope::Suffix;
      auto cs = psp::build_constraints(parse_model(cm_model), original,
                                       old_plan, cm_prefix, preds, scope);
      psp::CompileOptions copts;
      copts.replace_originals = cm_replace;
      auto cp = psp::compile(pddl::with_init(original, perturbed_init), cs,
                             copts);
      pddl::Problem out = psp::to_preferences(cp);
      spit(cm_out_domain,
           pddl::emit_domain(*out.domain, pddl::ProblemDialect::Pddl3));
      spit(cm_out_problem, pddl::emit_problem(out));
      std::printf("%zu constraints -> %s, %s\n", cs.size(),
                  cm_out_domain.c_str(), cm_out_problem.c_str());
    } else if (*sim) {
      pddl::Problem prob = load_problem(sm_domain, sm_problem);
      plans::Plan plan = load_plan(sm_plan, prob);
      auto v = plans::validate(prob, plan);
      if (!v.executable) {
        std::printf("inapplicable at step %zu: %s\n", v.failed_step,
                    v.failure.c_str());
        return 1;
      }
      if (sm_trace) {
        auto trace = plans::simulate(prob.init, plan);
        for (std::size_t i = 0; i < trace.size(); ++i) {
          std::printf("; state %zu\n", i);
          std::fputs(pddl::emit_state(trace[i]).c_str(), stdout);
        }
      }
      std::printf("executable: yes\nhard_goals: %s\n",
                  v.unmet_hard_goals.empty() ? "satisfied" : "UNMET");
      for (const auto& g : v.unmet_hard_goals)
        std::printf("  unmet %s\n", g.str().c_str());
      std::printf("penalty_sum: %g\n", v.penalty_sum);
      if (!v.valid()) return 1;
    } else if (*diff) {
      auto to_plan = [](const std::string& path) {
        plans::Plan p;
        for (const auto& s : pddl::parse_plan_steps(slurp(path))) {
          pddl::GroundAction a;
          a.name = s.name;
          a.args = s.args;
          p.push_back(std::move(a));
        }
        return p;
      };
      auto d = plans::plan_diff(to_plan(df_old), to_plan(df_new), df_multiset);
      std::printf("set_diff: %zu\nsym_diff: %zu\n", d.set_diff, d.sym_diff);
    } else if (*bench_cmd) {
      if (!bn_config.empty()) {
        // Explicit flags win over the config file.
        auto j = nlohmann::json::parse(slurp(bn_config));
        if (j.contains("min_packages") && !o_min->count())
          bc.min_packages = j["min_packages"].get<int>();
        if (j.contains("max_packages") && !o_max->count())
          bc.max_packages = j["max_packages"].get<int>();
        if (j.contains("seeds_per_size") && !o_seeds->count())
          bc.seeds_per_size = j["seeds_per_size"].get<int>();
        if (j.contains("base_seed") && !o_base->count())
          bc.base_seed = j["base_seed"].get<std::uint64_t>();
        if (j.contains("budget_s") && !o_budget->count())
          bc.budget_s = j["budget_s"].get<double>();
        if (j.contains("jobs") && !o_jobs->count())
          bc.jobs = j["jobs"].get<int>();
        if (j.contains("scope") && !o_scope->count())
          bn_scope = j["scope"].get<std::string>();
        if (j.contains("multiset") && !o_multi->count())
          bc.multiset_diffs = j["multiset"].get<bool>();
        if (j.contains("solver") && !o_solver->count())
          bn_solver = j["solver"].get<std::string>();
        if (j.contains("out") && !o_out->count())
          bn_out = j["out"].get<std::string>();
      }
      bc.scope = bn_scope == "full" ? psp::ConstraintScope::Full
                                    : psp::ConstraintScope::Suffix;
      SolverChoice solver = parse_solver(bn_solver);
      if (solver.external) bc.solver_template = solver.command;
      auto rows = bench::run_bench(bc, bn_out, !bn_quiet);
      std::printf("%zu rows -> %s\n\n%s", rows.size(), bn_out.c_str(),
                  bench::summarize(rows).c_str());
    } else if (*plot) {
      bench::emit_plots(pl_csv, pl_out);
      std::printf("plot data and scripts in %s/\n", pl_out.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
