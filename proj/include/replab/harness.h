#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "replab/compilation.h"
#include "replab/constraints.h"
#include "replab/solver.h"
#include "replab/warehouses.h"

namespace bench {

enum class Strategy { Restart, Similarity, Commitment };

const char* to_string(Strategy s);
psp::ReplanModel model_of(Strategy s);

// One CSV row. Metric fields are empty (not zero) unless the run produced a
// plan; timed-out and unsolvable runs contribute no data points.
struct MetricsRecord {
  std::string instance;
  std::uint64_t seed = 0;
  int packages = 0;
  Strategy strategy = Strategy::Restart;
  std::optional<double> time_ms;  // constraint build + compile + search
  std::optional<std::size_t> plan_len;
  std::optional<std::size_t> set_diff;
  std::optional<std::size_t> sym_diff;
  std::optional<std::size_t> violations;
  std::string status;  // ok | timeout | unsolvable
};

inline const char* kCsvHeader =
    "instance,seed,packages,strategy,time_ms,plan_len,set_diff,sym_diff,"
    "violations,status";

struct BenchConfig {
  int min_packages = 1;
  int max_packages = 12;
  int seeds_per_size = 4;
  std::uint64_t base_seed = 1;
  double budget_s = 60.0;  // per replanning run
  search::PlannerConfig planner;  // node budget, weights; budgets applied per run
  std::vector<Strategy> strategies = {Strategy::Restart, Strategy::Similarity,
                                      Strategy::Commitment};
  psp::ConstraintScope scope = psp::ConstraintScope::Suffix;
  bool multiset_diffs = false;
  int jobs = 0;                 // 0 = hardware concurrency
  std::string solver_template;  // empty = embedded planner
};

// Replans one scenario under one strategy and measures all three metric
// families on the result, whichever of them was optimized. The restart
// strategy takes the first plan found; similarity and commitment run the
// anytime search with the pessimistic soft-goal mode so the penalty term
// actually steers the search. Compiled with replace_originals, which makes
// the planner's penalty coincide exactly with set_diff (similarity) and
// violations (commitment).
MetricsRecord run_scenario(const wh::Scenario& sc, Strategy strategy,
                           const BenchConfig& cfg);

// The full experiment: generates every scenario, runs every (scenario,
// strategy) pair in a worker pool, and keeps `csv_path` flushed with the
// completed rows in canonical order after each finish. Returns all rows.
std::vector<MetricsRecord> run_bench(const BenchConfig& cfg,
                                     const std::string& csv_path,
                                     bool verbose = false);

void write_csv(const std::string& path,
               const std::vector<MetricsRecord>& rows, const BenchConfig& cfg);
std::vector<MetricsRecord> read_csv(const std::string& path);

// Mean of each metric per (packages, strategy), as a printable table.
std::string summarize(const std::vector<MetricsRecord>& rows);

// Five plot artifacts (data file + matplotlib script each), one per metric;
// the replan-time plot uses a log scale.
void emit_plots(const std::string& csv_path, const std::string& out_dir);

}  // namespace bench
