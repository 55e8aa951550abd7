#include "cpsopt/model_search.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cpsopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kStaleRoundLimit = 10;

bool same_point(const Vector& a, const Vector& b) { return a == b; }

Vector gather(const Vector& x, const std::vector<int>& vars) {
  Vector out(static_cast<Eigen::Index>(vars.size()));
  for (std::size_t k = 0; k < vars.size(); ++k) out[k] = x[vars[k]];
  return out;
}

bool inside(const Vector& y, const Vector& lo, const Vector& hi) {
  return (y.array() >= lo.array()).all() && (y.array() <= hi.array()).all();
}

}  // namespace

void PointHistory::add(const Vector& x, double f) {
  if (x.size() != dim_) throw std::invalid_argument("history: dimension mismatch");
  if (capacity_ == 0) return;
  if (points_.size() == capacity_) {
    points_.pop_front();
    values_.pop_front();
  }
  points_.push_back(x);
  values_.push_back(f);
}

void PointHistory::add(std::span<const double> x, double f) {
  add(Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size())),
      f);
}

void PointHistory::set_capacity(std::size_t c) {
  capacity_ = c;
  while (points_.size() > capacity_) {
    points_.pop_front();
    values_.pop_front();
  }
}

namespace {

// Indices of up to `count` distinct finite-valued points nearest to center.
std::vector<std::size_t> nearest_indices(const PointHistory& history,
                                         const Vector& center,
                                         std::size_t count) {
  const std::size_t m = history.size();
  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::isfinite(history.value(i))) continue;
    order.emplace_back((history.point(i) - center).squaredNorm(), i);
  }
  // Ties go to the most recent point.
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : a.second > b.second;
  });
  std::vector<std::size_t> out;
  for (const auto& [d, i] : order) {
    if (out.size() == count) break;
    bool dup = false;
    for (std::size_t j = out.size(); j-- > 0;) {
      if (same_point(history.point(out[j]), history.point(i))) {
        dup = true;
        break;
      }
      // Sorted by distance: earlier entries further away cannot coincide.
      if ((history.point(out[j]) - center).squaredNorm() < d) break;
    }
    if (!dup) out.push_back(i);
  }
  return out;
}

SampleSet to_samples(const PointHistory& h,
                     const std::vector<std::size_t>& idx, std::size_t from,
                     std::size_t to) {
  SampleSet s;
  s.points.resize(static_cast<Eigen::Index>(to - from), h.dim());
  s.values.resize(static_cast<Eigen::Index>(to - from));
  for (std::size_t k = from; k < to; ++k) {
    s.points.row(k - from) = h.point(idx[k]).transpose();
    s.values[k - from] = h.value(idx[k]);
  }
  return s;
}

}  // namespace

SampleSet closest_points(const PointHistory& history, const Vector& center,
                         int count) {
  const auto idx = nearest_indices(history, center, count);
  return to_samples(history, idx, 0, idx.size());
}

RegularizeResult regularize_sample_set(const Matrix& points, DegreeClass degree,
                                       const Vector& center, const Vector& lo,
                                       const Vector& hi, double k_ill, Rng& rng,
                                       int max_retries) {
  RegularizeResult out;
  out.points = points;
  const int p = static_cast<int>(points.rows());
  if (!std::isfinite(k_ill) || p < 2) return out;
  // Coordinates pinned by the box cannot be repaired by new points; their
  // basis columns are left out of the conditioning test.
  std::vector<int> free_dims;
  for (int k = 0; k < points.cols(); ++k) {
    if (hi[k] > lo[k]) free_dims.push_back(k);
  }
  if (free_dims.empty()) return out;
  const int dim = static_cast<int>(points.cols());
  const int free_dim = static_cast<int>(free_dims.size());
  Vector free_center(free_dim);
  for (int k = 0; k < free_dim; ++k) free_center[k] = center[free_dims[k]];
  auto restrict = [&](const Matrix& pts) {
    Matrix r(pts.rows(), free_dim);
    for (int k = 0; k < free_dim; ++k) r.col(k) = pts.col(free_dims[k]);
    return r;
  };
  if (max_retries < 0) max_retries = 3 * basis_size(free_dim, degree);

  Matrix best = points;
  std::vector<int> best_replaced;
  double best_cond = kInf;
  int stale_rounds = 0;
  std::vector<int> replaced;
  for (int attempt = 0;; ++attempt) {
    const auto sys =
        detail::build_system(restrict(out.points), degree, free_center);
    Eigen::BDCSVD<Matrix> svd(sys.m, Eigen::ComputeThinU);
    const Vector& sigma = svd.singularValues();
    const double smax = sigma[0];
    const double cut = smax / k_ill;
    const double cond = sigma[sigma.size() - 1] > 0.0
                            ? smax / sigma[sigma.size() - 1]
                            : kInf;
    if (cond < best_cond) {
      best_cond = cond;
      best = out.points;
      best_replaced = replaced;
      stale_rounds = 0;
    } else {
      ++stale_rounds;
    }
    std::vector<int> deficient;
    for (int j = 0; j < sigma.size(); ++j) {
      if (!(sigma[j] > cut)) deficient.push_back(j);
    }
    if (deficient.empty()) return out;
    // Points drawn from a box much smaller than the sample spread cannot
    // lift the deficient directions; stop once rounds stop helping.
    if (attempt >= max_retries || stale_rounds >= kStaleRoundLimit) {
      out.points = best;
      out.replaced = best_replaced;
      out.warning = true;
      return out;
    }
    // One replacement per deficient direction, each on the row that carries
    // most of it, so a rank deficit of r costs one SVD rather than r.
    const Matrix& u = svd.matrixU();
    std::vector<char> taken(p, 0);
    for (int j : deficient) {
      int worst = -1;
      double worst_w = -1.0;
      for (int i = 1; i < p; ++i) {
        if (taken[i]) continue;
        const double w = u(i, j) * u(i, j);
        if (w > worst_w) {
          worst_w = w;
          worst = i;
        }
      }
      if (worst < 0) break;
      taken[worst] = 1;
      for (int k = 0; k < dim; ++k) out.points(worst, k) = rng.uniform(lo[k], hi[k]);
      if (std::find(replaced.begin(), replaced.end(), worst) == replaced.end()) {
        replaced.push_back(worst);
      }
    }
    out.replaced = replaced;
  }
}

Matrix poisedness_stencil(const Vector& center, const Vector& lo,
                          const Vector& hi, int random_points, Rng& rng) {
  const int d = static_cast<int>(center.size());
  std::vector<Vector> pts;
  pts.push_back(center);
  for (int i = 0; i < d; ++i) {
    for (double b : {lo[i], hi[i]}) {
      if (b == center[i]) continue;
      Vector y = center;
      y[i] = b;
      pts.push_back(y);
    }
  }
  if (d <= 4) {
    for (int mask = 0; mask < (1 << d); ++mask) {
      Vector y(d);
      for (int i = 0; i < d; ++i) y[i] = (mask >> i) & 1 ? hi[i] : lo[i];
      pts.push_back(y);
    }
  }
  for (int r = 0; r < random_points; ++r) {
    Vector y(d);
    for (int i = 0; i < d; ++i) y[i] = rng.uniform(lo[i], hi[i]);
    pts.push_back(y);
  }
  Matrix out(static_cast<Eigen::Index>(pts.size()), d);
  for (std::size_t k = 0; k < pts.size(); ++k) out.row(k) = pts[k].transpose();
  return out;
}

namespace {

struct LagrangeTable {
  double scale = 1.0;
  Matrix l;        // p-bar x p, columns are Lagrange coefficient vectors
  Matrix values;   // stencil x p
  int rank = 0;
};

LagrangeTable lagrange_table(const Matrix& points, DegreeClass degree,
                             const Vector& center, const Matrix& stencil) {
  LagrangeTable t;
  const auto sys = detail::build_system(points, degree, center);
  t.scale = sys.scale;
  t.l = detail::pseudo_inverse(sys.m, kNoConditioningCap, &t.rank);
  t.values = detail::basis_matrix(stencil, degree, center, sys.scale) * t.l;
  return t;
}

}  // namespace

double estimate_lambda(const Matrix& points, DegreeClass degree,
                       const Vector& center, const Matrix& stencil) {
  const auto t = lagrange_table(points, degree, center, stencil);
  if (t.rank < points.rows()) return kInf;
  return t.values.cwiseAbs().maxCoeff();
}

PoisednessResult improve_poisedness(
    const SampleSet& samples, const std::vector<Vector>& candidates,
    const std::vector<double>& candidate_values, DegreeClass degree,
    const Vector& center, const Vector& lo, const Vector& hi,
    const PoisednessOptions& opts, Rng& rng,
    const std::function<double(const Vector&)>& evaluate) {
  PoisednessResult res;
  res.samples = samples;
  const int p = static_cast<int>(samples.points.rows());
  if (p < 2) return res;
  const Matrix stencil =
      poisedness_stencil(center, lo, hi, opts.random_points, rng);
  auto table = lagrange_table(res.samples.points, degree, center, stencil);
  if (table.rank < p) {
    res.lambda_before = res.lambda_after = kInf;
    return res;
  }
  double lambda = table.values.cwiseAbs().maxCoeff();
  res.lambda_before = res.lambda_after = lambda;

  std::vector<char> used(candidates.size(), 0);
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (!inside(candidates[c], lo, hi)) used[c] = 1;
  }

  while (res.swaps < opts.max_swaps && lambda > opts.threshold) {
    // Worst polynomial, never the one attached to the center point.
    int worst = -1;
    double worst_val = -1.0;
    for (int j = 1; j < p; ++j) {
      const double v = table.values.col(j).cwiseAbs().maxCoeff();
      if (v > worst_val) {
        worst_val = v;
        worst = j;
      }
    }
    if (worst < 0) break;

    // Lambda after replacing y_worst by a point with Lagrange values lrow,
    // using the rank-one update of the Lagrange basis.
    auto score = [&](const Eigen::RowVectorXd& lrow) {
      const double pivot = lrow[worst];
      if (std::abs(pivot) < 1e-8) return kInf;
      double lam = 0.0;
      const Vector lw = table.values.col(worst) / pivot;
      for (int j = 0; j < p; ++j) {
        const double v =
            j == worst ? lw.cwiseAbs().maxCoeff()
                       : (table.values.col(j) - lrow[j] * lw).cwiseAbs().maxCoeff();
        lam = std::max(lam, v);
      }
      return lam;
    };

    double best_lam = lambda;
    int best_cand = -1;
    Eigen::Index best_row = -1;
    if (!candidates.empty()) {
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (used[c]) continue;
        const Matrix row = detail::basis_matrix(candidates[c].transpose(),
                                                degree, center, table.scale);
        const double s = score(row * table.l);
        if (s < best_lam) {
          best_lam = s;
          best_cand = static_cast<int>(c);
        }
      }
    }
    Eigen::Index arg;
    table.values.col(worst).cwiseAbs().maxCoeff(&arg);
    const double s_max = score(table.values.row(arg));
    if (s_max < best_lam) {
      best_lam = s_max;
      best_cand = -1;
      best_row = arg;
    }
    if (best_cand < 0 && best_row < 0) break;

    SampleSet trial = res.samples;
    if (best_cand >= 0) {
      trial.points.row(worst) = candidates[best_cand].transpose();
      trial.values[worst] = candidate_values[best_cand];
    } else {
      const Vector y = stencil.row(best_row).transpose();
      trial.points.row(worst) = y.transpose();
      trial.values[worst] = evaluate(y);
      ++res.new_evaluations;
    }
    auto next = lagrange_table(trial.points, degree, center, stencil);
    const double next_lambda = next.rank < p
                                   ? kInf
                                   : next.values.cwiseAbs().maxCoeff();
    if (!(next_lambda < lambda)) break;
    if (best_cand >= 0) used[best_cand] = 1;
    const double gain = (lambda - next_lambda) / lambda;
    res.samples = std::move(trial);
    table = std::move(next);
    lambda = next_lambda;
    res.lambda_after = lambda;
    ++res.swaps;
    if (gain < opts.min_improvement) break;
  }
  return res;
}

bool SearchState::prepare(double stepsize) {
  if (!initialized_) {
    initialized_ = true;
    tr_.delta = std::min(stepsize, tr_.delta_max);
  } else if (tr_.delta < tr_.delta_min) {
    tr_.delta = std::min(stepsize, tr_.delta_max);
  }
  return tr_.delta >= tr_.delta_min;
}

namespace {

PoisednessOptions poisedness_options(const ModelSearchConfig& cfg) {
  PoisednessOptions o;
  o.threshold = cfg.lambda_threshold;
  o.max_swaps = cfg.max_swaps;
  o.min_improvement = cfg.min_lambda_improvement;
  o.random_points = cfg.stencil_random_points;
  return o;
}

// Sample set around `center`, regularized and with improved poisedness.
// Newly introduced points are evaluated through `evaluate`.
SampleSet prepare_samples(const PointHistory& history, const Vector& center,
                          DegreeClass degree, double k_ill, const Vector& lo,
                          const Vector& hi, const ModelSearchConfig& cfg,
                          Rng& rng, const PointEvaluator& evaluate,
                          bool& warning) {
  const int pbar = basis_size(static_cast<int>(center.size()), degree);
  const auto idx = nearest_indices(history, center, 3 * pbar);
  const std::size_t p = std::min<std::size_t>(idx.size(), pbar);
  SampleSet y = to_samples(history, idx, 0, p);
  if (p == 0) return y;

  auto reg = regularize_sample_set(y.points, degree, center, lo, hi, k_ill, rng);
  warning = warning || reg.warning;
  y.points = reg.points;
  for (int row : reg.replaced) y.values[row] = evaluate(y.points.row(row).transpose());

  if (p >= 2) {
    std::vector<Vector> cand;
    std::vector<double> cand_val;
    for (std::size_t k = p; k < idx.size(); ++k) {
      cand.push_back(history.point(idx[k]));
      cand_val.push_back(history.value(idx[k]));
    }
    auto improved = improve_poisedness(y, cand, cand_val, degree, center, lo,
                                       hi, poisedness_options(cfg), rng,
                                       evaluate);
    y = std::move(improved.samples);
  }
  return y;
}

bool finite_model(const PolyModel& m) {
  return std::isfinite(m.c) && m.g.allFinite() && m.h.allFinite();
}

// Evaluates the trial point and updates the radius.
SearchOutcome finish_step(SearchState& state, const QuadraticForm& q,
                          const Vector& s, const Vector& x_best, double f_best,
                          const Vector& lower, const Vector& upper,
                          const PointEvaluator& evaluate) {
  SearchOutcome out;
  out.attempted = true;
  const double step_norm = s.lpNorm<Eigen::Infinity>();
  const double pred = s.allFinite() ? -q.value(s) : 0.0;
  if (step_norm == 0.0 || !(pred > 0.0)) {
    state.record(-kInf, s.allFinite() ? step_norm : 0.0);
    return out;
  }
  out.x = project_to_bounds(lower, upper, x_best + s);
  out.f = evaluate(out.x);
  out.evaluated = true;
  out.rho = (f_best - out.f) / pred;
  if (std::isnan(out.rho)) out.rho = -kInf;
  state.record(out.rho, step_norm);
  out.accepted = out.f < f_best;
  return out;
}

}  // namespace

SearchOutcome search_step_full(SearchState& state, const PointHistory& history,
                               const Vector& x_best, double f_best,
                               double stepsize, const Vector& lower,
                               const Vector& upper, Rng& rng,
                               const PointEvaluator& evaluate) {
  SearchOutcome out;
  if (!state.prepare(stepsize)) return out;
  const auto& cfg = state.config();
  const double delta = state.trust_region().delta;
  const int n = static_cast<int>(x_best.size());
  const Vector lo = lower.cwiseMax((x_best.array() - delta).matrix());
  const Vector hi = upper.cwiseMin((x_best.array() + delta).matrix());

  DegreeClass degree = cfg.degree;
  while (basis_size(n, degree) > cfg.max_basis_size &&
         degree != DegreeClass::kLinear) {
    degree = degree == DegreeClass::kQuadratic ? DegreeClass::kDiagonal
                                               : DegreeClass::kLinear;
  }
  const double k_ill = cfg.k_ill.value_or(1e12);

  bool warning = false;
  const SampleSet y = prepare_samples(history, x_best, degree, k_ill, lo, hi,
                                      cfg, rng, evaluate, warning);
  if (y.points.rows() == 0) return out;
  PolyModel model;
  try {
    model = fit_model(y.points, y.values, degree, cfg.fit, k_ill, x_best).model;
  } catch (const std::invalid_argument&) {
    out.regularization_warning = warning;
    return out;
  }
  if (!finite_model(model)) return out;
  const QuadraticForm q = quadratic_form(model);
  const Vector s = solve_box_qp(q, lo - x_best, hi - x_best);
  out = finish_step(state, q, s, x_best, f_best, lower, upper, evaluate);
  out.regularization_warning = warning;
  return out;
}

void AssembledModel::hess_vec(const Vector& v, Vector& out) const {
  out.setZero(v.size());
  Vector local, hv;
  for (std::size_t e = 0; e < element_h.size(); ++e) {
    const auto& vars = *element_vars[e];
    local = gather(v, vars);
    hv.noalias() = element_h[e] * local;
    for (std::size_t k = 0; k < vars.size(); ++k) out[vars[k]] += hv[k];
  }
}

QuadraticForm AssembledModel::form() const {
  QuadraticForm q;
  q.g = g;
  q.hess_vec = [this](const Vector& v, Vector& out) { hess_vec(v, out); };
  return q;
}

AssembledModel assemble_models(int n, const std::vector<PolyModel>& models,
                               const std::vector<const std::vector<int>*>& vars) {
  AssembledModel a;
  a.g = Vector::Zero(n);
  a.element_vars = vars;
  a.element_h.reserve(models.size());
  for (std::size_t e = 0; e < models.size(); ++e) {
    const auto& v = *vars[e];
    for (std::size_t k = 0; k < v.size(); ++k) a.g[v[k]] += models[e].g[k];
    a.element_h.push_back(models[e].h);
  }
  return a;
}

namespace {

PolyModel fit_element(const SampleSet& y, DegreeClass degree, FitMode mode,
                      double k_ill, const Vector& center) {
  const int d = static_cast<int>(center.size());
  try {
    auto m = fit_model(y.points, y.values, degree, mode, k_ill, center).model;
    if (finite_model(m)) return m;
  } catch (const std::invalid_argument&) {
  }
  if (degree != DegreeClass::kLinear) {
    try {
      const int p = std::min<int>(static_cast<int>(y.points.rows()), d + 1);
      auto m = fit_model(y.points.topRows(p), y.values.head(p),
                         DegreeClass::kLinear, mode, k_ill, center)
                   .model;
      if (finite_model(m)) {
        PolyModel out = PolyModel::zero(d, degree, center);
        out.c = m.c;
        out.g = m.g;
        return out;
      }
    } catch (const std::invalid_argument&) {
    }
  }
  PolyModel out = PolyModel::zero(d, degree, center);
  if (y.values.size() > 0 && std::isfinite(y.values[0])) out.c = y.values[0];
  return out;
}

}  // namespace

SearchOutcome search_step_structured(SearchState& state,
                                     const std::vector<ElementModelView>& elements,
                                     const Vector& x_best, double f_best,
                                     double stepsize, const Vector& lower,
                                     const Vector& upper, Rng& rng,
                                     const PointEvaluator& evaluate_full) {
  SearchOutcome out;
  if (!state.prepare(stepsize)) return out;
  const auto& cfg = state.config();
  const double delta = state.trust_region().delta;
  const int n = static_cast<int>(x_best.size());
  const Vector lo = lower.cwiseMax((x_best.array() - delta).matrix());
  const Vector hi = upper.cwiseMin((x_best.array() + delta).matrix());
  const double k_ill = cfg.k_ill.value_or(kInf);

  bool warning = false;
  std::vector<PolyModel> models;
  std::vector<const std::vector<int>*> vars;
  models.reserve(elements.size());
  vars.reserve(elements.size());
  for (const auto& e : elements) {
    const Vector c = gather(x_best, *e.vars);
    const Vector elo = gather(lo, *e.vars);
    const Vector ehi = gather(hi, *e.vars);
    const SampleSet y = prepare_samples(*e.history, c, cfg.degree, k_ill, elo,
                                        ehi, cfg, rng, e.evaluate, warning);
    models.push_back(fit_element(y, cfg.degree, cfg.fit, k_ill, c));
    vars.push_back(e.vars);
  }
  const AssembledModel model = assemble_models(n, models, vars);
  const QuadraticForm q = model.form();
  const Vector s = solve_box_qp(q, lo - x_best, hi - x_best);
  out = finish_step(state, q, s, x_best, f_best, lower, upper, evaluate_full);
  out.regularization_warning = warning;
  return out;
}

}  // namespace cpsopt
