#include "cpsopt/direct_search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace cpsopt {

namespace {

struct BudgetStop {};
struct TimeStop {};

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

// Core poll loop over `count` directions supplied by `column(j)`.  `eval`
// returns f at a trial point; `accept` is invoked right after a trial point
// has replaced the incumbent, before anything else is evaluated.
template <class Column, class Eval, class Accept>
PollOutcome poll_impl(const Vector& x0, double fx, int count, Column&& column,
                      double alpha, const Vector& lo, const Vector& hi,
                      double eta, Eval&& eval, Accept&& accept) {
  PollOutcome out;
  out.x = x0;
  out.f = fx;
  Vector trial(x0.size());
  const double forcing = eta * alpha * alpha;
  for (int j = 0; j < count; ++j) {
    const auto d = column(j);
    for (double sign : {1.0, -1.0}) {
      trial = (out.x + (sign * alpha) * d).cwiseMax(lo).cwiseMin(hi);
      if (trial == out.x) continue;
      const double ft = eval(trial);
      ++out.evaluations;
      if (ft < out.f) {
        const bool sufficient = ft <= out.f - forcing;
        out.x = trial;
        out.f = ft;
        out.simple = true;
        accept();
        if (sufficient) {
          out.sufficient = true;
          return out;
        }
        break;
      }
    }
  }
  return out;
}

}  // namespace

void SolverConfig::validate(int n) const {
  auto fail = [](const char* what) {
    throw std::invalid_argument(std::string("invalid solver config: ") + what);
  };
  if (!(epsilon > 0.0)) fail("epsilon must be > 0");
  if (!(alpha0 > 0.0)) fail("alpha0 must be > 0");
  if (!(gamma >= 1.0)) fail("gamma must be >= 1");
  if (!(beta > 0.0 && beta < 1.0)) fail("beta must lie in (0, 1)");
  if (!(eta > 0.0 && eta < 1.0)) fail("eta must lie in (0, 1)");
  if (!(iota >= 1.0)) fail("iota must be >= 1");
  if (n2 < 0 || n2 > n) fail("n2 must lie in [1, n] (0 selects min(n, 10))");
  if (max_full_evals < 1) fail("max_full_evals must be >= 1");
  if (extra_unsuccessful_passes < 0) fail("extra_unsuccessful_passes must be >= 0");
  if (!(time_limit_seconds > 0.0)) fail("time limit must be > 0");
}

int SolverConfig::effective_n2(int n) const {
  return n2 > 0 ? n2 : std::min(n, 10);
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::kConverged: return "converged";
    case RunStatus::kBudget: return "budget";
    case RunStatus::kTime: return "time";
  }
  return "?";
}

RunStatus parse_run_status(const std::string& s) {
  if (s == "converged") return RunStatus::kConverged;
  if (s == "budget") return RunStatus::kBudget;
  if (s == "time") return RunStatus::kTime;
  throw std::invalid_argument("unknown run status '" + s + "'");
}

PollOutcome poll_step(const std::function<double(const Vector&)>& f,
                      const Vector& x, double fx, const Matrix& basis,
                      double alpha, const Vector& lower, const Vector& upper,
                      double eta) {
  return poll_impl(
      x, fx, static_cast<int>(basis.cols()),
      [&](int j) { return basis.col(j); }, alpha, lower, upper, eta,
      [&](const Vector& y) {
        const double v = f(y);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
      },
      [] {});
}

// ---------------------------------------------------------------------------
// Structured driver

StructuredPatternSearch::StructuredPatternSearch(const CpsProblem& p,
                                                 const SolverConfig& cfg)
    : p_(p),
      cfg_(cfg),
      sa_(analyze(p)),
      rng_(cfg.seed),
      ledger_(p.q()),
      search_(cfg.search) {
  cfg_.validate(p.n());
  alpha_.assign(sa_.r(), cfg_.alpha0);
  if (cfg_.use_search_step) {
    elem_history_.reserve(p.q());
    for (int i = 0; i < p.q(); ++i) {
      const int ni = static_cast<int>(p.element(i).vars.size());
      const int pbar = basis_size(ni, cfg_.search.degree);
      elem_history_.emplace_back(ni, std::max<std::size_t>(8 * pbar, 64));
    }
  }
}

void StructuredPatternSearch::charge(std::int64_t element_evals, bool full) {
  if (full_equivalent(ledger_) >= cfg_.max_full_evals) throw BudgetStop{};
  if (++evals_since_clock_ >= 256) {
    evals_since_clock_ = 0;
    if (now_seconds() - start_time_ > cfg_.time_limit_seconds) throw TimeStop{};
  }
  if (full) ledger_.add_full();
  else ledger_.add_elements(element_evals);
}

double StructuredPatternSearch::eval_full_cached(const Vector& x,
                                                 std::vector<double>& values) {
  charge(p_.q(), true);
  values.resize(p_.q());
  double sum = 0.0;
  for (int i = 0; i < p_.q(); ++i) {
    values[i] = p_.element_value(i, x);
    sum += values[i];
    if (!elem_history_.empty()) {
      const auto& vars = p_.element(i).vars;
      Vector local(static_cast<Eigen::Index>(vars.size()));
      for (std::size_t k = 0; k < vars.size(); ++k) local[k] = x[vars[k]];
      elem_history_[i].add(local, values[i]);
    }
  }
  return std::isnan(sum) ? std::numeric_limits<double>::infinity() : sum;
}

void StructuredPatternSearch::note_improvement() {
  double sum = 0.0;
  for (double v : elem_) sum += v;
  f_ = sum;
  if (result_.history.empty() || f_ < result_.history.back().best_f) {
    result_.history.push_back({full_equivalent(ledger_), f_});
  }
}

void StructuredPatternSearch::start() {
  start_time_ = now_seconds();
  x_ = p_.x0();
  f_ = eval_full_cached(x_, elem_);
  if (!std::isfinite(f_)) {
    throw std::runtime_error("objective is not finite at the starting point");
  }
  result_.history.push_back({full_equivalent(ledger_), f_});
}

double StructuredPatternSearch::global_stepsize() const {
  return *std::min_element(alpha_.begin(), alpha_.end());
}

double StructuredPatternSearch::subspace_poll(int k) {
  const auto& vars = sa_.groups[k];
  const auto& elems = sa_.group_elements[k];
  const int m = static_cast<int>(vars.size());
  const double a = alpha_[k];

  Vector local(m), lo(m), hi(m);
  for (int j = 0; j < m; ++j) {
    local[j] = x_[vars[j]];
    lo[j] = p_.lower()[vars[j]];
    hi[j] = p_.upper()[vars[j]];
  }
  double base = 0.0;
  for (int i : elems) base += elem_[i];

  LazyOrthonormalBasis basis(m, rng_);
  Vector cur = local, last(m);
  std::vector<double> trial_vals(elems.size());
  const bool keep_history = !elem_history_.empty();

  // Trial values are written into x_ only for the duration of the element
  // evaluations, so the incumbent never needs copying.
  auto eval = [&](const Vector& y) {
    charge(static_cast<std::int64_t>(elems.size()), false);
    for (int j = 0; j < m; ++j) x_[vars[j]] = y[j];
    double sum = 0.0;
    for (std::size_t e = 0; e < elems.size(); ++e) {
      trial_vals[e] = p_.element_value(elems[e], x_);
      sum += trial_vals[e];
      if (keep_history) {
        const auto& ev = p_.element(elems[e]).vars;
        Vector sub(static_cast<Eigen::Index>(ev.size()));
        for (std::size_t t = 0; t < ev.size(); ++t) sub[t] = x_[ev[t]];
        elem_history_[elems[e]].add(sub, trial_vals[e]);
      }
    }
    for (int j = 0; j < m; ++j) x_[vars[j]] = cur[j];
    last = y;
    return std::isnan(sum) ? std::numeric_limits<double>::infinity() : sum;
  };
  auto accept = [&] {
    cur = last;
    for (int j = 0; j < m; ++j) x_[vars[j]] = cur[j];
    for (std::size_t e = 0; e < elems.size(); ++e) elem_[elems[e]] = trial_vals[e];
    note_improvement();
  };
  const PollOutcome out =
      poll_impl(local, base, m, [&](int j) { return basis.column(j); }, a, lo,
                hi, cfg_.eta, eval, accept);

  const double decrease = base - out.f;
  if (decrease > 0.0 && decrease >= cfg_.eta * a * a) alpha_[k] = cfg_.gamma * a;
  else alpha_[k] = std::pow(cfg_.beta, cfg_.iota) * a;
  return decrease;
}

SweepReport StructuredPatternSearch::structured_sweep() {
  SweepReport rep;
  const auto fe0 = ledger_.full_evals();
  const auto re0 = ledger_.restricted_element_evals();
  const int t = sa_.t();
  // A sweep that stops early resumes at the next collection, otherwise a
  // collection that keeps producing small decreases would starve the rest.
  for (int step = 0; step < t; ++step) {
    const int h = (next_collection_ + step) % t;
    double total = 0.0;
    double last_alpha = cfg_.alpha0;
    for (int k : sa_.collections[h]) {
      last_alpha = alpha_[k];
      total += subspace_poll(k);
    }
    ++rep.collections_polled;
    if (total > 0.0 && total >= cfg_.eta * last_alpha * last_alpha) {
      rep.sufficient = true;
      next_collection_ = (h + 1) % t;
      break;
    }
  }
  rep.full_evals = ledger_.full_evals() - fe0;
  rep.element_evals = ledger_.restricted_element_evals() - re0;
  return rep;
}

bool StructuredPatternSearch::second_pass() {
  const int n = p_.n();
  const double a = global_stepsize();
  LazyOrthonormalBasis basis(n, rng_);
  std::vector<double> trial_vals;
  Vector last;
  auto eval = [&](const Vector& y) {
    last = y;
    return eval_full_cached(y, trial_vals);
  };
  auto accept = [&] {
    x_ = last;
    elem_ = trial_vals;
    note_improvement();
  };
  const PollOutcome out =
      poll_impl(x_, f_, cfg_.effective_n2(n),
                [&](int j) { return basis.column(j); }, a, p_.lower(),
                p_.upper(), cfg_.eta, eval, accept);
  return out.sufficient;
}

void StructuredPatternSearch::search_step() {
  std::vector<ElementModelView> views;
  views.reserve(p_.q());
  for (int i = 0; i < p_.q(); ++i) {
    ElementModelView v;
    v.vars = &p_.element(i).vars;
    v.history = &elem_history_[i];
    v.evaluate = [this, i](const Vector& local) {
      charge(1, false);
      const double val = p_.element_value_local(
          i, std::span<const double>(local.data(), local.size()));
      elem_history_[i].add(local, val);
      return val;
    };
    views.push_back(std::move(v));
  }
  std::vector<double> trial_vals;
  auto full = [&](const Vector& y) { return eval_full_cached(y, trial_vals); };
  ++result_.search_steps;
  const SearchOutcome out =
      search_step_structured(search_, views, x_, f_, global_stepsize(),
                             p_.lower(), p_.upper(), rng_, full);
  result_.regularization_warning |= out.regularization_warning;
  if (out.accepted) {
    ++result_.search_successes;
    x_ = out.x;
    elem_ = trial_vals;
    note_improvement();
  }
}

SolveResult StructuredPatternSearch::run() {
  start();
  try {
    for (;;) {
      ++result_.iterations;
      if (cfg_.use_search_step) search_step();
      if (structured_sweep().sufficient) continue;
      if (global_stepsize() > cfg_.epsilon) continue;
      ++result_.second_passes;
      if (second_pass()) continue;
      result_.status = RunStatus::kConverged;
      break;
    }
  } catch (const BudgetStop&) {
    result_.status = RunStatus::kBudget;
  } catch (const TimeStop&) {
    result_.status = RunStatus::kTime;
  }
  result_.x = x_;
  result_.f = f_;
  result_.full_equivalent = full_equivalent(ledger_);
  result_.full_evals = ledger_.full_evals();
  result_.restricted_element_evals = ledger_.restricted_element_evals();
  result_.final_stepsize = global_stepsize();
  result_.history.push_back({result_.full_equivalent, f_});
  result_.wall_seconds = now_seconds() - start_time_;
  return result_;
}

// ---------------------------------------------------------------------------
// Unstructured driver

UnstructuredPatternSearch::UnstructuredPatternSearch(const CpsProblem& p,
                                                     const SolverConfig& cfg)
    : p_(p),
      cfg_(cfg),
      rng_(cfg.seed),
      ledger_(p.q()),
      alpha_(cfg.alpha0),
      history_(p.n(), 0),
      search_(cfg.search) {
  cfg_.validate(p.n());
  if (cfg_.use_search_step) {
    const int pbar = std::min(basis_size(p.n(), cfg_.search.degree),
                              cfg_.search.max_basis_size);
    history_.set_capacity(std::max(4 * pbar, 256));
  }
}

double UnstructuredPatternSearch::eval(const Vector& x) {
  if (full_equivalent(ledger_) >= cfg_.max_full_evals) throw BudgetStop{};
  if (++evals_since_clock_ >= 256) {
    evals_since_clock_ = 0;
    if (now_seconds() - start_time_ > cfg_.time_limit_seconds) throw TimeStop{};
  }
  const double v = evaluate_full(p_, x, ledger_);
  history_.add(x, v);
  return v;
}

void UnstructuredPatternSearch::note_improvement() {
  if (result_.history.empty() || f_ < result_.history.back().best_f) {
    result_.history.push_back({full_equivalent(ledger_), f_});
  }
}

void UnstructuredPatternSearch::start() {
  start_time_ = now_seconds();
  x_ = p_.x0();
  f_ = eval(x_);
  if (!std::isfinite(f_)) {
    throw std::runtime_error("objective is not finite at the starting point");
  }
  result_.history.push_back({full_equivalent(ledger_), f_});
}

PollOutcome UnstructuredPatternSearch::poll() {
  LazyOrthonormalBasis basis(p_.n(), rng_);
  Vector last;
  double last_f = 0.0;
  auto eval_track = [&](const Vector& y) {
    last = y;
    last_f = eval(y);
    return last_f;
  };
  auto accept = [&] {
    x_ = last;
    f_ = last_f;
    note_improvement();
  };
  return poll_impl(x_, f_, p_.n(), [&](int j) { return basis.column(j); },
                   alpha_, p_.lower(), p_.upper(), cfg_.eta, eval_track,
                   accept);
}

SolveResult UnstructuredPatternSearch::run() {
  start();
  int extra_left = cfg_.extra_unsuccessful_passes;
  try {
    for (;;) {
      ++result_.iterations;
      if (cfg_.use_search_step) {
        ++result_.search_steps;
        const SearchOutcome s = search_step_full(
            search_, history_, x_, f_, alpha_, p_.lower(), p_.upper(), rng_,
            [this](const Vector& y) { return eval(y); });
        result_.regularization_warning |= s.regularization_warning;
        if (s.accepted) {
          ++result_.search_successes;
          x_ = s.x;
          f_ = s.f;
          note_improvement();
        }
      }
      const PollOutcome out = poll();
      if (out.simple) {
        alpha_ *= cfg_.gamma;
        extra_left = cfg_.extra_unsuccessful_passes;
        continue;
      }
      if (alpha_ > cfg_.epsilon) {
        alpha_ *= cfg_.beta;
        continue;
      }
      if (extra_left > 0) {
        --extra_left;
        continue;
      }
      result_.status = RunStatus::kConverged;
      break;
    }
  } catch (const BudgetStop&) {
    result_.status = RunStatus::kBudget;
  } catch (const TimeStop&) {
    result_.status = RunStatus::kTime;
  }
  result_.x = x_;
  result_.f = f_;
  result_.full_equivalent = full_equivalent(ledger_);
  result_.full_evals = ledger_.full_evals();
  result_.restricted_element_evals = ledger_.restricted_element_evals();
  result_.final_stepsize = alpha_;
  result_.history.push_back({result_.full_equivalent, f_});
  result_.wall_seconds = now_seconds() - start_time_;
  return result_;
}

SolveResult solve_unstructured(const CpsProblem& p, const SolverConfig& cfg) {
  UnstructuredPatternSearch s(p, cfg);
  return s.run();
}

SolveResult solve_structured(const CpsProblem& p, const SolverConfig& cfg) {
  StructuredPatternSearch s(p, cfg);
  return s.run();
}

}  // namespace cpsopt
