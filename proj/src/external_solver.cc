#include "replab/external_solver.h"

#include <sys/types.h>
#include <sys/wait.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <unistd.h>

#include "replab/grounding.h"
#include "replab/parser.h"
#include "replab/writer.h"

namespace search {

namespace fs = std::filesystem;

namespace {

std::string substitute(std::string tmpl, const std::string& key,
                       const std::string& value) {
  std::string::size_type pos = 0;
  while ((pos = tmpl.find(key, pos)) != std::string::npos) {
    tmpl.replace(pos, key.size(), value);
    pos += value.size();
  }
  return tmpl;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out)
    throw ExternalSolverError(ExternalSolverError::Kind::ProcessFailure,
                              "cannot write " + path.string());
}

fs::path scratch_root() {
  if (const char* env = std::getenv("REPLAB_SCRATCH"); env && *env)
    return fs::path(env);
  return fs::temp_directory_path();
}

struct RunOutcome {
  bool timed_out = false;
  int exit_code = 0;
};

// Runs `command` via /bin/sh in its own process group so a timeout kill
// reaches every descendant.
RunOutcome run_with_timeout(const std::string& command, double timeout_s) {
  pid_t pid = fork();
  if (pid < 0)
    throw ExternalSolverError(ExternalSolverError::Kind::ProcessFailure,
                              "fork failed");
  if (pid == 0) {
    setpgid(0, 0);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);  // in the parent too; closes the startup race

  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::duration<double>(timeout_s);
  RunOutcome outcome;
  for (;;) {
    int status = 0;
    pid_t r = waitpid(pid, &status, WNOHANG);
    if (r == pid) {
      outcome.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128;
      return outcome;
    }
    if (r < 0 && errno != EINTR)
      throw ExternalSolverError(ExternalSolverError::Kind::ProcessFailure,
                                "waitpid failed");
    if (std::chrono::steady_clock::now() >= deadline) {
      outcome.timed_out = true;
      kill(-pid, SIGKILL);
      waitpid(pid, &status, 0);
      return outcome;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
}

}  // namespace

PlanResult solve_external(const pddl::Problem& prob,
                          const std::string& command_template,
                          double timeout_s, double length_weight) {
  auto start = std::chrono::steady_clock::now();

  fs::path dir;
  {
    std::string templ =
        (scratch_root() / "replab-ext-XXXXXX").string();
    std::vector<char> buf(templ.begin(), templ.end());
    buf.push_back('\0');
    if (!mkdtemp(buf.data()))
      throw ExternalSolverError(ExternalSolverError::Kind::ProcessFailure,
                                "cannot create scratch directory under " +
                                    scratch_root().string());
    dir = buf.data();
  }
  struct Cleanup {
    fs::path dir;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(dir, ec);
    }
  } cleanup{dir};

  fs::path domain_path = dir / "domain.pddl";
  fs::path problem_path = dir / "problem.pddl";
  fs::path plan_path = dir / "plan.txt";
  write_file(domain_path,
             pddl::emit_domain(*prob.domain, pddl::ProblemDialect::Pddl3));
  write_file(problem_path,
             pddl::emit_problem(prob, pddl::ProblemDialect::Pddl3));

  std::string cmd = command_template;
  cmd = substitute(cmd, "{domain}", domain_path.string());
  cmd = substitute(cmd, "{problem}", problem_path.string());
  cmd = substitute(cmd, "{plan_out}", plan_path.string());
  cmd = substitute(cmd, "{timeout}",
                   std::to_string(static_cast<long>(std::ceil(timeout_s))));

  RunOutcome outcome = run_with_timeout(cmd, timeout_s);

  auto finish_time = [&] {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start)
        .count();
  };

  if (!fs::exists(plan_path)) {
    if (outcome.timed_out) {
      PlanResult res;
      res.status = SolveStatus::Timeout;
      res.wall_time_ms = finish_time();
      return res;
    }
    if (outcome.exit_code != 0)
      throw ExternalSolverError(
          ExternalSolverError::Kind::ProcessFailure,
          "external solver exited with code " +
              std::to_string(outcome.exit_code) + " and wrote no plan");
    throw ExternalSolverError(ExternalSolverError::Kind::UnparsableOutput,
                              "external solver wrote no plan file");
  }

  std::ifstream in(plan_path);
  std::stringstream text;
  text << in.rdbuf();

  plans::Plan plan;
  try {
    for (const auto& step : pddl::parse_plan_steps(text.str()))
      plan.push_back(pddl::resolve_step(prob, step.name, step.args));
  } catch (const std::exception& e) {
    throw ExternalSolverError(ExternalSolverError::Kind::UnparsableOutput,
                              std::string("cannot ingest external plan: ") +
                                  e.what());
  }

  plans::Validation v = plans::validate(prob, plan);
  if (!v.valid())
    throw ExternalSolverError(
        ExternalSolverError::Kind::InvalidPlan,
        "external plan fails validation: " +
            (v.executable ? std::string("hard goals unmet") : v.failure));

  PlanResult res;
  res.plan = std::move(plan);
  res.plan_length = res.plan->size();
  res.penalty_sum = v.penalty_sum;
  res.objective =
      length_weight * static_cast<double>(res.plan_length) + res.penalty_sum;
  res.status = SolveStatus::Satisficing;
  res.wall_time_ms = finish_time();
  return res;
}

}  // namespace search
