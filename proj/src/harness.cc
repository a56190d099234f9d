#include "replab/harness.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "replab/external_solver.h"
#include "replab/rng.h"

namespace bench {

namespace {

using Clock = std::chrono::steady_clock;

std::size_t honored_commitments(const std::vector<plans::Commitment>& wanted,
                                const plans::StateTrace& trace) {
  std::size_t honored = 0;
  for (const auto& c : wanted)
    for (const auto& s : trace)
      if (s.contains(c)) {
        ++honored;
        break;
      }
  return honored;
}

std::string csv_escape(const std::string& s) {
  // Instance ids and statuses never contain commas or quotes; keep the
  // writer trivial but fail loudly if that ever changes.
  if (s.find_first_of(",\"\n") != std::string::npos)
    throw std::runtime_error("value not representable in CSV: " + s);
  return s;
}

template <typename T>
std::string opt_str(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_same_v<T, double>)
    return std::to_string(static_cast<long long>(std::llround(*v)));
  else
    return std::to_string(*v);
}

}  // namespace

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::Restart: return "restart";
    case Strategy::Similarity: return "similarity";
    case Strategy::Commitment: return "commitment";
  }
  return "?";
}

psp::ReplanModel model_of(Strategy s) {
  switch (s) {
    case Strategy::Restart: return psp::ReplanModel::M1_Restart;
    case Strategy::Similarity: return psp::ReplanModel::M2_Similarity;
    case Strategy::Commitment: return psp::ReplanModel::M3_Commitment;
  }
  return psp::ReplanModel::M1_Restart;
}

MetricsRecord run_scenario(const wh::Scenario& sc, Strategy strategy,
                           const BenchConfig& cfg) {
  MetricsRecord rec;
  rec.instance = sc.instance;
  rec.seed = sc.spec.seed;
  rec.packages = sc.spec.num_packages;
  rec.strategy = strategy;

  pddl::Problem perturbed = pddl::with_init(sc.problem, sc.perturbed_init);

  auto t0 = Clock::now();
  psp::ConstraintSet cs = psp::build_constraints(
      model_of(strategy), sc.problem, sc.plan, sc.perturbation.prefix_len,
      wh::commitment_predicates(), cfg.scope);
  psp::CompileOptions copts;
  copts.replace_originals = true;
  psp::CompiledProblem cp = psp::compile(perturbed, cs, copts);

  search::PlanResult res;
  if (!cfg.solver_template.empty()) {
    res = search::solve_external(psp::to_preferences(cp), cfg.solver_template,
                                 cfg.budget_s, cfg.planner.length_weight);
  } else {
    search::PlannerConfig pc = cfg.planner;
    pc.time_budget_s = cfg.budget_s;
    if (strategy == Strategy::Restart) {
      pc.anytime = false;  // any plan will do; take the first
    } else {
      pc.anytime = true;
      pc.soft_mode = search::SoftGoalMode::Pessimistic;
    }
    res = search::solve(cp.problem, pc);
  }
  double elapsed_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - t0).count();

  if (!res.plan) {
    rec.status =
        res.status == search::SolveStatus::Unsolvable ? "unsolvable" : "timeout";
    return rec;
  }
  rec.status = "ok";
  rec.time_ms = elapsed_ms;
  plans::Plan replanned = psp::strip_instrumentation(cp, *res.plan);
  rec.plan_len = replanned.size();

  // Diffs against the same stretch of the old plan the constraints covered.
  std::size_t scope_begin = cfg.scope == psp::ConstraintScope::Suffix
                                ? sc.perturbation.prefix_len
                                : 0;
  plans::Plan scope_plan(sc.plan.begin() + scope_begin, sc.plan.end());
  plans::PlanDiff d = plans::plan_diff(scope_plan, replanned,
                                       cfg.multiset_diffs);
  rec.set_diff = d.set_diff;
  rec.sym_diff = d.sym_diff;

  auto commitments = plans::extract_commitments(sc.problem, sc.plan,
                                                wh::commitment_predicates());
  auto trace = plans::simulate(sc.perturbed_init, replanned);
  rec.violations = commitments.size() - honored_commitments(commitments, trace);
  return rec;
}

void write_csv(const std::string& path, const std::vector<MetricsRecord>& rows,
               const BenchConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# replab bench\n";
  out << "# scope="
      << (cfg.scope == psp::ConstraintScope::Suffix ? "suffix" : "full")
      << "\n";
  out << "# diffs=" << (cfg.multiset_diffs ? "multiset" : "set") << "\n";
  out << "# budget_s=" << cfg.budget_s << "\n";
  out << "# base_seed=" << cfg.base_seed << "\n";
  out << kCsvHeader << "\n";
  for (const auto& r : rows) {
    out << csv_escape(r.instance) << ',' << r.seed << ',' << r.packages << ','
        << to_string(r.strategy) << ',' << opt_str(r.time_ms) << ','
        << opt_str(r.plan_len) << ',' << opt_str(r.set_diff) << ','
        << opt_str(r.sym_diff) << ',' << opt_str(r.violations) << ','
        << csv_escape(r.status) << "\n";
  }
}

std::vector<MetricsRecord> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::vector<MetricsRecord> rows;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      if (line != kCsvHeader)
        throw std::runtime_error("unexpected CSV header: " + line);
      saw_header = true;
      continue;
    }
    std::vector<std::string> field;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) field.push_back(item);
    while (field.size() < 10) field.push_back("");
    MetricsRecord r;
    r.instance = field[0];
    r.seed = std::stoull(field[1]);
    r.packages = std::stoi(field[2]);
    if (field[3] == "restart") r.strategy = Strategy::Restart;
    else if (field[3] == "similarity") r.strategy = Strategy::Similarity;
    else if (field[3] == "commitment") r.strategy = Strategy::Commitment;
    else throw std::runtime_error("unknown strategy: " + field[3]);
    if (!field[4].empty()) r.time_ms = std::stod(field[4]);
    if (!field[5].empty()) r.plan_len = std::stoull(field[5]);
    if (!field[6].empty()) r.set_diff = std::stoull(field[6]);
    if (!field[7].empty()) r.sym_diff = std::stoull(field[7]);
    if (!field[8].empty()) r.violations = std::stoull(field[8]);
    r.status = field[9];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<MetricsRecord> run_bench(const BenchConfig& cfg,
                                     const std::string& csv_path,
                                     bool verbose) {
  if (cfg.min_packages > cfg.max_packages || cfg.seeds_per_size < 1)
    throw std::invalid_argument("empty bench configuration");

  // Scenario generation configs are independent of the per-run budget: the
  // original plan just has to exist.
  search::PlannerConfig gen_cfg = cfg.planner;
  gen_cfg.anytime = false;
  gen_cfg.time_budget_s = std::max(cfg.budget_s, 120.0);

  struct Slot {
    wh::InstanceSpec spec;
    wh::Perturbation::Kind kind;
  };
  std::vector<Slot> slots;
  for (int n = cfg.min_packages; n <= cfg.max_packages; ++n)
    for (int k = 0; k < cfg.seeds_per_size; ++k) {
      Slot s;
      s.spec = wh::InstanceSpec::for_packages(
          n, util::derive_seed(cfg.base_seed,
                               static_cast<std::uint64_t>(n) * 100 + k));
      s.kind = k % 2 == 0 ? wh::Perturbation::Kind::PackageFalls
                          : wh::Perturbation::Kind::CarrierBreaks;
      slots.push_back(s);
    }

  int jobs = cfg.jobs > 0
                 ? cfg.jobs
                 : std::max(1u, std::thread::hardware_concurrency());

  // Phase 1: scenarios, in parallel (each is deterministic on its own).
  std::vector<wh::Scenario> scenarios(slots.size());
  {
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::string first_error;
    auto worker = [&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= slots.size()) return;
        try {
          wh::Scenario sc;
          // An unperturbable draw is re-rolled with a shifted stream.
          for (int attempt = 0;; ++attempt) {
            try {
              wh::InstanceSpec spec = slots[i].spec;
              if (attempt > 0)
                spec.seed = util::derive_seed(spec.seed, attempt);
              sc = wh::make_scenario(spec, slots[i].kind, gen_cfg);
              break;
            } catch (const wh::UnperturbableError&) {
              if (attempt >= 8) throw;
            }
          }
          scenarios[i] = std::move(sc);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (first_error.empty())
            first_error = "scenario " + std::to_string(i) + ": " + e.what();
        }
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (!first_error.empty()) throw std::runtime_error(first_error);
  }

  // Phase 2: every (scenario, strategy) pair; rows land in canonical order
  // no matter which worker finishes first.
  struct Job {
    std::size_t scenario;
    Strategy strategy;
  };
  std::vector<Job> jobs_list;
  for (std::size_t i = 0; i < scenarios.size(); ++i)
    for (Strategy s : cfg.strategies) jobs_list.push_back({i, s});

  std::vector<MetricsRecord> rows(jobs_list.size());
  std::vector<char> done(jobs_list.size(), 0);
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::string first_error;

  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= jobs_list.size()) return;
      try {
        MetricsRecord rec = run_scenario(scenarios[jobs_list[i].scenario],
                                         jobs_list[i].strategy, cfg);
        std::lock_guard<std::mutex> lock(mu);
        rows[i] = std::move(rec);
        done[i] = 1;
        if (!csv_path.empty()) {
          std::vector<MetricsRecord> flushed;
          for (std::size_t k = 0; k < rows.size(); ++k)
            if (done[k]) flushed.push_back(rows[k]);
          write_csv(csv_path, flushed, cfg);
        }
        if (verbose) {
          std::fprintf(stderr, "[%zu/%zu] %s %s: %s\n", i + 1,
                       jobs_list.size(), rows[i].instance.c_str(),
                       to_string(rows[i].strategy), rows[i].status.c_str());
        }
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (first_error.empty()) first_error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (!first_error.empty()) throw std::runtime_error(first_error);

  if (!csv_path.empty()) write_csv(csv_path, rows, cfg);
  return rows;
}

std::string summarize(const std::vector<MetricsRecord>& rows) {
  struct Agg {
    double time = 0, len = 0, set = 0, sym = 0, viol = 0;
    int ok = 0, other = 0;
  };
  std::map<std::pair<int, std::string>, Agg> buckets;
  for (const auto& r : rows) {
    Agg& a = buckets[{r.packages, to_string(r.strategy)}];
    if (r.status == "ok" && r.time_ms) {
      ++a.ok;
      a.time += *r.time_ms;
      a.len += static_cast<double>(*r.plan_len);
      a.set += static_cast<double>(*r.set_diff);
      a.sym += static_cast<double>(*r.sym_diff);
      a.viol += static_cast<double>(*r.violations);
    } else {
      ++a.other;
    }
  }
  std::ostringstream out;
  out << "packages strategy     ok  mean_ms  mean_len  set  sym  viol\n";
  for (const auto& [key, a] : buckets) {
    char line[160];
    if (a.ok > 0) {
      std::snprintf(line, sizeof line,
                    "%8d %-11s %3d %8.1f %9.1f %4.1f %4.1f %5.1f\n",
                    key.first, key.second.c_str(), a.ok, a.time / a.ok,
                    a.len / a.ok, a.set / a.ok, a.sym / a.ok, a.viol / a.ok);
    } else {
      std::snprintf(line, sizeof line, "%8d %-11s %3d %8s %9s %4s %4s %5s\n",
                    key.first, key.second.c_str(), a.ok, "-", "-", "-", "-",
                    "-");
    }
    out << line;
  }
  return out.str();
}

void emit_plots(const std::string& csv_path, const std::string& out_dir) {
  auto rows = read_csv(csv_path);
  if (rows.empty()) throw std::runtime_error("no rows in " + csv_path);
  std::filesystem::create_directories(out_dir);

  struct Axis {
    const char* file;
    const char* title;
    bool log;
    std::optional<double> (*get)(const MetricsRecord&);
  };
  const Axis axes[] = {
      {"replan_time", "Time taken to replan (ms)", true,
       [](const MetricsRecord& r) { return r.time_ms; }},
      {"plan_size", "Plan size (number of actions)", false,
       [](const MetricsRecord& r) {
         return r.plan_len ? std::optional<double>(double(*r.plan_len))
                           : std::nullopt;
       }},
      {"set_diff", "Set difference vs. original plan", false,
       [](const MetricsRecord& r) {
         return r.set_diff ? std::optional<double>(double(*r.set_diff))
                           : std::nullopt;
       }},
      {"sym_diff", "Symmetric difference vs. original plan", false,
       [](const MetricsRecord& r) {
         return r.sym_diff ? std::optional<double>(double(*r.sym_diff))
                           : std::nullopt;
       }},
      {"violations", "Agent commitments violated", false,
       [](const MetricsRecord& r) {
         return r.violations ? std::optional<double>(double(*r.violations))
                             : std::nullopt;
       }},
  };
  const Strategy strategies[] = {Strategy::Restart, Strategy::Similarity,
                                 Strategy::Commitment};

  for (const Axis& axis : axes) {
    std::map<int, std::map<Strategy, std::pair<double, int>>> agg;
    for (const auto& r : rows) {
      auto v = axis.get(r);
      if (!v) continue;  // timeouts contribute no data points
      auto& [sum, count] = agg[r.packages][r.strategy];
      sum += *v;
      ++count;
    }

    std::string dat_path = out_dir + "/" + axis.file + ".dat";
    std::ofstream dat(dat_path);
    dat << "# packages restart similarity commitment (mean per size)\n";
    for (const auto& [packages, per] : agg) {
      dat << packages;
      for (Strategy s : strategies) {
        auto it = per.find(s);
        if (it == per.end() || it->second.second == 0)
          dat << " nan";
        else
          dat << ' ' << it->second.first / it->second.second;
      }
      dat << "\n";
    }

    std::ofstream py(out_dir + "/" + axis.file + ".py");
    py << "#!/usr/bin/env python3\n"
       << "import os.path\n"
       << "import matplotlib\n"
       << "matplotlib.use('Agg')\n"
       << "import matplotlib.pyplot as plt\n\n"
       << "here = os.path.dirname(os.path.abspath(__file__))\n"
       << "rows = []\n"
       << "with open(os.path.join(here, '" << axis.file << ".dat')) as f:\n"
       << "    for line in f:\n"
       << "        if line.startswith('#'):\n"
       << "            continue\n"
       << "        rows.append([float(x) for x in line.split()])\n\n"
       << "xs = [r[0] for r in rows]\n"
       << "labels = ['restart', 'similarity', 'commitment']\n"
       << "marks = ['o-', 's-', '^-']\n"
       << "for i, label in enumerate(labels):\n"
       << "    plt.plot(xs, [r[i + 1] for r in rows], marks[i], label=label)\n";
    if (axis.log) py << "plt.yscale('log')\n";
    py << "plt.xlabel('Number of packages')\n"
       << "plt.ylabel('" << axis.title << "')\n"
       << "plt.legend()\n"
       << "plt.grid(True, alpha=0.3)\n"
       << "plt.savefig(os.path.join(here, '" << axis.file
       << ".png'), dpi=150)\n";
  }
}

}  // namespace bench
