#ifndef CPSOPT_PROBLEM_HPP_
#define CPSOPT_PROBLEM_HPP_

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace cpsopt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Element functions receive the subvector x_{X_i} in the order of the
// element's (sorted) variable list.
using ElementFunction = std::function<double(std::span<const double>)>;

struct Element {
  std::vector<int> vars;  // 0-based, sorted, unique
  ElementFunction fn;
};

// A coordinate partially separable objective f(x) = sum_i f_i(x_{X_i})
// together with simple bounds and a starting point.  Immutable once built.
class CpsProblem {
 public:
  // Throws std::invalid_argument when any structural invariant is violated
  // (empty or unsorted domains, uncovered variables, x0 outside the bounds).
  CpsProblem(std::string name, int n, std::vector<Element> elements,
             Vector lower, Vector upper, Vector x0);

  const std::string& name() const { return name_; }
  int n() const { return n_; }
  int q() const { return static_cast<int>(elements_.size()); }
  const std::vector<Element>& elements() const { return elements_; }
  const Element& element(int i) const { return elements_[i]; }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  const Vector& x0() const { return x0_; }

  // Raw value of element i at the full vector x.  Non-finite results are
  // mapped to +inf.  Does not touch any ledger.
  double element_value(int i, const Vector& x) const;
  // Same, but from an already gathered local subvector.
  double element_value_local(int i, std::span<const double> local) const;

 private:
  std::string name_;
  int n_;
  std::vector<Element> elements_;
  Vector lower_;
  Vector upper_;
  Vector x0_;
};

// Counts element evaluations for one run.  Evaluations performed as part of
// a whole-objective evaluation are booked as full evaluations so that the
// full-equivalent conversion never counts them twice.
class EvalLedger {
 public:
  explicit EvalLedger(int q);

  void add_full(std::int64_t count = 1) { full_evals_ += count; }
  void add_elements(std::int64_t count) { restricted_evals_ += count; }

  int q() const { return q_; }
  std::int64_t full_evals() const { return full_evals_; }
  std::int64_t restricted_element_evals() const { return restricted_evals_; }
  // Every individual element evaluation, including those inside full ones.
  std::int64_t element_evals() const {
    return restricted_evals_ + full_evals_ * q_;
  }

 private:
  int q_;
  std::int64_t full_evals_ = 0;
  std::int64_t restricted_evals_ = 0;
};

// full_evals + round(restricted element evaluations / q), rounding half away
// from zero.
std::int64_t full_equivalent(const EvalLedger& ledger);

double evaluate_full(const CpsProblem& p, const Vector& x, EvalLedger& ledger);

// Evaluates every element at x, storing f_i in `values` (resized to q), and
// books one full evaluation.  Returns the sum (+inf if any element is).
double evaluate_elements(const CpsProblem& p, const Vector& x,
                         EvalLedger& ledger, std::vector<double>& values);

// Sum of f_i over `indices` (0-based element indices).
double evaluate_restricted(const CpsProblem& p, std::span<const int> indices,
                           const Vector& x, EvalLedger& ledger);

Vector project_to_bounds(const CpsProblem& p, const Vector& x);
Vector project_to_bounds(const Vector& lower, const Vector& upper,
                         const Vector& x);

bool is_feasible(const CpsProblem& p, const Vector& x);

}  // namespace cpsopt

#endif  // CPSOPT_PROBLEM_HPP_
