#ifndef CPSOPT_DIRECT_SEARCH_HPP_
#define CPSOPT_DIRECT_SEARCH_HPP_

#include "cpsopt/model_search.hpp"
#include "cpsopt/problem.hpp"
#include "cpsopt/random.hpp"
#include "cpsopt/structure.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace cpsopt {

struct SolverConfig {
  double epsilon = 1e-4;
  double alpha0 = 1.0;
  double gamma = 2.0;
  double beta = 0.5;
  double eta = 1e-4;
  double iota = 1.2550;
  int n2 = 0;  // 0: min(n, 10)
  std::int64_t max_full_evals = 100000;
  std::uint64_t seed = 0;
  bool use_search_step = false;
  int extra_unsuccessful_passes = 1;
  double time_limit_seconds = std::numeric_limits<double>::infinity();
  ModelSearchConfig search;

  // Throws std::invalid_argument naming the offending field.
  void validate(int n) const;
  int effective_n2(int n) const;
};

enum class RunStatus { kConverged, kBudget, kTime };
std::string to_string(RunStatus s);
RunStatus parse_run_status(const std::string& s);

struct HistorySample {
  std::int64_t evals;  // full-equivalent evaluations
  double best_f;
};

struct SolveResult {
  Vector x;
  double f = 0.0;
  RunStatus status = RunStatus::kConverged;
  std::int64_t full_equivalent = 0;
  std::int64_t full_evals = 0;
  std::int64_t restricted_element_evals = 0;
  std::vector<HistorySample> history;
  std::int64_t iterations = 0;
  std::int64_t second_passes = 0;
  std::int64_t search_steps = 0;
  std::int64_t search_successes = 0;
  bool regularization_warning = false;
  double final_stepsize = 0.0;
  double wall_seconds = 0.0;
};

struct PollOutcome {
  Vector x;
  double f = 0.0;
  bool sufficient = false;  // stopped on f_trial <= f_current - eta alpha^2
  bool simple = false;      // any decrease
  int evaluations = 0;
};

// Polls x +- alpha d_j for j = 0..count-1, forward first, the backward trial
// only when the forward one does not decrease f.  Trial points are clamped to
// [lower, upper]; a trial that clamps back onto x is not evaluated.  Each
// simple decrease replaces x; a sufficient one also ends the loop.
PollOutcome poll_step(const std::function<double(const Vector&)>& f,
                      const Vector& x, double fx, const Matrix& basis,
                      double alpha, const Vector& lower, const Vector& upper,
                      double eta);

// Per-sweep accounting exposed for instrumentation and tests.
struct SweepReport {
  bool sufficient = false;
  std::int64_t element_evals = 0;
  std::int64_t full_evals = 0;
  int collections_polled = 0;
};

// Structured pattern search over the subspaces of a StructureAnalysis.
// Element values at the incumbent are cached, so every subspace baseline is
// free and each trial costs |Y_k| element evaluations.
class StructuredPatternSearch {
 public:
  StructuredPatternSearch(const CpsProblem& p, const SolverConfig& cfg);

  SolveResult run();

  // Building blocks, usable after start().
  void start();
  double subspace_poll(int k);
  SweepReport structured_sweep();
  bool second_pass();

  const StructureAnalysis& analysis() const { return sa_; }
  const Vector& x() const { return x_; }
  double f() const { return f_; }
  const std::vector<double>& stepsizes() const { return alpha_; }
  double global_stepsize() const;
  const EvalLedger& ledger() const { return ledger_; }

 private:
  double eval_full_cached(const Vector& x, std::vector<double>& values);
  void charge(std::int64_t element_evals, bool full);
  void note_improvement();
  void search_step();

  const CpsProblem& p_;
  SolverConfig cfg_;
  StructureAnalysis sa_;
  Rng rng_;
  EvalLedger ledger_;
  Vector x_;
  double f_ = 0.0;
  std::vector<double> elem_;   // f_i at x_
  std::vector<double> alpha_;  // per subspace
  int next_collection_ = 0;
  std::vector<std::vector<int>> y_lists_;
  std::vector<PointHistory> elem_history_;
  SearchState search_;
  SolveResult result_;
  std::int64_t evals_since_clock_ = 0;
  double start_time_ = 0.0;
};

class UnstructuredPatternSearch {
 public:
  UnstructuredPatternSearch(const CpsProblem& p, const SolverConfig& cfg);

  SolveResult run();

  void start();
  // One poll loop over a fresh basis at the current stepsize.
  PollOutcome poll();

  const Vector& x() const { return x_; }
  double f() const { return f_; }
  double stepsize() const { return alpha_; }
  const EvalLedger& ledger() const { return ledger_; }

 private:
  double eval(const Vector& x);
  void note_improvement();

  const CpsProblem& p_;
  SolverConfig cfg_;
  Rng rng_;
  EvalLedger ledger_;
  Vector x_;
  double f_ = 0.0;
  double alpha_ = 1.0;
  PointHistory history_;
  SearchState search_;
  SolveResult result_;
  std::int64_t evals_since_clock_ = 0;
  double start_time_ = 0.0;
};

SolveResult solve_unstructured(const CpsProblem& p, const SolverConfig& cfg);
SolveResult solve_structured(const CpsProblem& p, const SolverConfig& cfg);

}  // namespace cpsopt

#endif  // CPSOPT_DIRECT_SEARCH_HPP_
