#ifndef CPSOPT_MODEL_SEARCH_HPP_
#define CPSOPT_MODEL_SEARCH_HPP_

#include "cpsopt/poly_model.hpp"
#include "cpsopt/random.hpp"
#include "cpsopt/trust_region.hpp"

#include <deque>
#include <functional>
#include <optional>
#include <vector>

namespace cpsopt {

struct ModelSearchConfig {
  DegreeClass degree = DegreeClass::kQuadratic;
  FitMode fit = FitMode::kMinNorm;
  // Unset: infinity for structured models, 1e12 for full-space models.
  std::optional<double> k_ill;
  TrustRegion tr;
  double lambda_threshold = 100.0;
  int max_swaps = 10;
  double min_lambda_improvement = 0.1;
  int stencil_random_points = 50;
  // Full-space models fall back to a cheaper degree class when the
  // configured one would need more basis functions than this.
  int max_basis_size = 2000;
};

// Evaluated points kept for model building; the oldest are dropped first.
class PointHistory {
 public:
  explicit PointHistory(int dim, std::size_t capacity = 4096)
      : dim_(dim), capacity_(capacity) {}

  void add(const Vector& x, double f);
  void add(std::span<const double> x, double f);
  std::size_t size() const { return values_.size(); }
  int dim() const { return dim_; }
  std::size_t capacity() const { return capacity_; }
  void set_capacity(std::size_t c);
  const Vector& point(std::size_t i) const { return points_[i]; }
  double value(std::size_t i) const { return values_[i]; }

 private:
  int dim_;
  std::size_t capacity_;
  std::deque<Vector> points_;
  std::deque<double> values_;
};

struct SampleSet {
  Matrix points;  // p x d
  Vector values;
};

// Up to `count` distinct history points closest to `center` in the 2-norm.
// `center` itself must be in the history; it is placed first.
SampleSet closest_points(const PointHistory& history, const Vector& center,
                         int count);

struct RegularizeResult {
  Matrix points;
  std::vector<int> replaced;  // rows holding new, not yet evaluated points
  bool warning = false;       // retry cap hit; best-conditioned set returned
};

// Replaces points responsible for singular values below sigma_max / k_ill by
// uniform random points of the box [lo, hi].  Row 0 is never replaced.
RegularizeResult regularize_sample_set(const Matrix& points, DegreeClass degree,
                                       const Vector& center, const Vector& lo,
                                       const Vector& hi, double k_ill, Rng& rng,
                                       int max_retries = -1);

struct PoisednessOptions {
  double threshold = 100.0;
  int max_swaps = 10;
  double min_improvement = 0.1;
  int random_points = 50;
};

struct PoisednessResult {
  SampleSet samples;
  double lambda_before = 0.0;
  double lambda_after = 0.0;
  int swaps = 0;
  int new_evaluations = 0;
};

// Stencil estimate of max_j max_box |l_j|: center, face centers, corners
// (when d <= 4) and random points of the box.
Matrix poisedness_stencil(const Vector& center, const Vector& lo,
                          const Vector& hi, int random_points, Rng& rng);
double estimate_lambda(const Matrix& points, DegreeClass degree,
                       const Vector& center, const Matrix& stencil);

// Exchanges sample points (never row 0) for history candidates or the
// stencil maximizer of the worst Lagrange polynomial.  `evaluate` is called
// only for stencil maximizers.
PoisednessResult improve_poisedness(
    const SampleSet& samples, const std::vector<Vector>& candidates,
    const std::vector<double>& candidate_values, DegreeClass degree,
    const Vector& center, const Vector& lo, const Vector& hi,
    const PoisednessOptions& opts, Rng& rng,
    const std::function<double(const Vector&)>& evaluate);

struct SearchOutcome {
  bool attempted = false;  // a model was built and minimized
  bool evaluated = false;  // f(x+) was computed
  bool accepted = false;   // f(x+) < f_best
  Vector x;
  double f = 0.0;
  double rho = 0.0;
  bool regularization_warning = false;
};

// Per-run trust-region state shared by both search steps.
class SearchState {
 public:
  explicit SearchState(const ModelSearchConfig& cfg) : cfg_(cfg), tr_(cfg.tr) {}

  // Applies the first-call / restart rule; false means skip the step.
  bool prepare(double stepsize);
  void record(double rho, double step_norm) {
    tr_ = update_radius(tr_, rho, step_norm);
  }
  const TrustRegion& trust_region() const { return tr_; }
  const ModelSearchConfig& config() const { return cfg_; }

 private:
  ModelSearchConfig cfg_;
  TrustRegion tr_;
  bool initialized_ = false;
};

using PointEvaluator = std::function<double(const Vector&)>;

// One full-space model search step around x_best.  Every evaluation goes
// through `evaluate`, which is expected to charge the ledger and append to
// `history`.
SearchOutcome search_step_full(SearchState& state, const PointHistory& history,
                               const Vector& x_best, double f_best,
                               double stepsize, const Vector& lower,
                               const Vector& upper, Rng& rng,
                               const PointEvaluator& evaluate);

// Element-wise variant: one model per element over its own variables,
// summed into a global quadratic that is minimized once.
struct ElementModelView {
  const std::vector<int>* vars;
  const PointHistory* history;
  // Evaluates the element at a local point (charged as one element eval).
  std::function<double(const Vector&)> evaluate;
};

struct AssembledModel {
  Vector g;
  std::vector<Matrix> element_h;
  std::vector<const std::vector<int>*> element_vars;

  void hess_vec(const Vector& v, Vector& out) const;
  QuadraticForm form() const;
};

AssembledModel assemble_models(int n, const std::vector<PolyModel>& models,
                               const std::vector<const std::vector<int>*>& vars);

SearchOutcome search_step_structured(SearchState& state,
                                     const std::vector<ElementModelView>& elements,
                                     const Vector& x_best, double f_best,
                                     double stepsize, const Vector& lower,
                                     const Vector& upper, Rng& rng,
                                     const PointEvaluator& evaluate_full);

}  // namespace cpsopt

#endif  // CPSOPT_MODEL_SEARCH_HPP_
