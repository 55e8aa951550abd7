#include "cpsopt/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cpsopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sanitize(double v) { return std::isfinite(v) ? v : kInf; }

void check_dimension(const CpsProblem& p, const Vector& x) {
  if (x.size() != p.n()) {
    throw std::invalid_argument("dimension mismatch: problem " + p.name() +
                                " has n=" + std::to_string(p.n()) +
                                " but x has " + std::to_string(x.size()) +
                                " entries");
  }
}

}  // namespace

CpsProblem::CpsProblem(std::string name, int n, std::vector<Element> elements,
                       Vector lower, Vector upper, Vector x0)
    : name_(std::move(name)),
      n_(n),
      elements_(std::move(elements)),
      lower_(std::move(lower)),
      upper_(std::move(upper)),
      x0_(std::move(x0)) {
  if (n_ <= 0) throw std::invalid_argument(name_ + ": n must be positive");
  if (elements_.empty()) throw std::invalid_argument(name_ + ": no elements");
  if (lower_.size() != n_ || upper_.size() != n_ || x0_.size() != n_) {
    throw std::invalid_argument(name_ + ": bounds/x0 length differs from n");
  }
  std::vector<char> covered(n_, 0);
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    const auto& vars = elements_[i].vars;
    if (vars.empty()) {
      throw std::invalid_argument(name_ + ": element " + std::to_string(i) +
                                  " has an empty domain");
    }
    for (std::size_t k = 0; k < vars.size(); ++k) {
      if (vars[k] < 0 || vars[k] >= n_) {
        throw std::invalid_argument(name_ + ": element " + std::to_string(i) +
                                    " references a variable out of range");
      }
      if (k > 0 && vars[k] <= vars[k - 1]) {
        throw std::invalid_argument(name_ + ": element " + std::to_string(i) +
                                    " domain is not sorted and unique");
      }
      covered[vars[k]] = 1;
    }
    if (!elements_[i].fn) {
      throw std::invalid_argument(name_ + ": element " + std::to_string(i) +
                                  " has no evaluator");
    }
  }
  for (int j = 0; j < n_; ++j) {
    if (!covered[j]) {
      throw std::invalid_argument(name_ + ": variable " + std::to_string(j) +
                                  " appears in no element");
    }
    if (!(lower_[j] <= upper_[j])) {
      throw std::invalid_argument(name_ + ": lower > upper at " +
                                  std::to_string(j));
    }
    if (!(lower_[j] <= x0_[j] && x0_[j] <= upper_[j])) {
      throw std::invalid_argument(name_ + ": x0 infeasible at " +
                                  std::to_string(j));
    }
  }
}

double CpsProblem::element_value(int i, const Vector& x) const {
  const auto& e = elements_[i];
  // Element domains are small; a stack buffer covers every suite problem.
  constexpr std::size_t kSmall = 16;
  if (e.vars.size() <= kSmall) {
    double buf[kSmall];
    for (std::size_t k = 0; k < e.vars.size(); ++k) buf[k] = x[e.vars[k]];
    return sanitize(e.fn(std::span<const double>(buf, e.vars.size())));
  }
  std::vector<double> local(e.vars.size());
  for (std::size_t k = 0; k < e.vars.size(); ++k) local[k] = x[e.vars[k]];
  return sanitize(e.fn(local));
}

double CpsProblem::element_value_local(int i,
                                       std::span<const double> local) const {
  return sanitize(elements_[i].fn(local));
}

EvalLedger::EvalLedger(int q) : q_(q) {
  if (q <= 0) throw std::invalid_argument("ledger requires q > 0");
}

std::int64_t full_equivalent(const EvalLedger& ledger) {
  const double ratio = static_cast<double>(ledger.restricted_element_evals()) /
                       static_cast<double>(ledger.q());
  return ledger.full_evals() + std::llround(ratio);
}

double evaluate_full(const CpsProblem& p, const Vector& x, EvalLedger& ledger) {
  check_dimension(p, x);
  double sum = 0.0;
  for (int i = 0; i < p.q(); ++i) sum += p.element_value(i, x);
  ledger.add_full();
  return sanitize(sum);
}

double evaluate_elements(const CpsProblem& p, const Vector& x,
                         EvalLedger& ledger, std::vector<double>& values) {
  check_dimension(p, x);
  values.resize(p.q());
  double sum = 0.0;
  for (int i = 0; i < p.q(); ++i) {
    values[i] = p.element_value(i, x);
    sum += values[i];
  }
  ledger.add_full();
  return sanitize(sum);
}

double evaluate_restricted(const CpsProblem& p, std::span<const int> indices,
                           const Vector& x, EvalLedger& ledger) {
  check_dimension(p, x);
  double sum = 0.0;
  for (int i : indices) {
    if (i < 0 || i >= p.q()) {
      throw std::invalid_argument("element index out of range");
    }
    sum += p.element_value(i, x);
  }
  ledger.add_elements(static_cast<std::int64_t>(indices.size()));
  return sanitize(sum);
}

Vector project_to_bounds(const Vector& lower, const Vector& upper,
                         const Vector& x) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

Vector project_to_bounds(const CpsProblem& p, const Vector& x) {
  return project_to_bounds(p.lower(), p.upper(), x);
}

bool is_feasible(const CpsProblem& p, const Vector& x) {
  for (int j = 0; j < p.n(); ++j) {
    if (!(x[j] >= p.lower()[j] && x[j] <= p.upper()[j])) return false;
  }
  return true;
}

}  // namespace cpsopt
