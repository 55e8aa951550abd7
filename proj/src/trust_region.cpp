#include "cpsopt/trust_region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cpsopt {

TrustRegion update_radius(const TrustRegion& tr, double rho, double step_norm) {
  TrustRegion out = tr;
  if (rho > tr.eta2) {
    out.delta = std::min(tr.alpha1 * tr.delta, tr.delta_max);
  } else if (rho >= tr.eta1) {
    out.delta = tr.delta;
  } else {
    out.delta = std::max(std::numeric_limits<double>::epsilon(),
                         tr.alpha2 * step_norm);
  }
  return out;
}

double QuadraticForm::value(const Vector& s) const {
  Vector hs(s.size());
  hess_vec(s, hs);
  return g.dot(s) + 0.5 * s.dot(hs);
}

QuadraticForm quadratic_form(const PolyModel& model) {
  QuadraticForm q;
  q.g = model.g;
  const Matrix* h = &model.h;
  // The model must outlive the form; callers keep both on the stack.
  q.hess_vec = [h](const Vector& v, Vector& out) { out.noalias() = *h * v; };
  return q;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest t >= 0 with lo <= s + t d <= hi, over components where d != 0.
double step_to_boundary(const Vector& s, const Vector& d, const Vector& lo,
                        const Vector& hi) {
  double t = kInf;
  for (int i = 0; i < s.size(); ++i) {
    if (d[i] > 0.0) t = std::min(t, (hi[i] - s[i]) / d[i]);
    else if (d[i] < 0.0) t = std::min(t, (lo[i] - s[i]) / d[i]);
  }
  return std::max(t, 0.0);
}

void clamp(Vector& s, const Vector& lo, const Vector& hi) {
  s = s.cwiseMax(lo).cwiseMin(hi);
}

}  // namespace

Vector solve_box_qp(const QuadraticForm& q, const Vector& lo, const Vector& hi) {
  const int n = static_cast<int>(q.g.size());
  Vector s = Vector::Zero(n);
  if (n == 0) return s;
  Vector hs = Vector::Zero(n);
  Vector grad(n), pg(n), trial(n), ds(n), hds(n), r(n), p(n), hp(n);
  const double gtol = 1e-12 * std::max(1.0, q.g.norm());
  double qval = 0.0;

  const int max_outer = std::max(50, 2 * n);
  for (int outer = 0; outer < max_outer; ++outer) {
    grad = q.g + hs;
    for (int i = 0; i < n; ++i) {
      const bool stuck = (s[i] <= lo[i] && grad[i] > 0.0) ||
                         (s[i] >= hi[i] && grad[i] < 0.0);
      pg[i] = stuck ? 0.0 : grad[i];
    }
    if (pg.norm() <= gtol) break;
    const double q_start = qval;

    // Cauchy point along the projected steepest-descent path.
    Vector dir = -pg;
    const double tmax = step_to_boundary(s, dir, lo, hi);
    q.hess_vec(pg, hp);
    const double curv = pg.dot(hp);
    double t = curv > 0.0 ? pg.squaredNorm() / curv : tmax;
    if (!std::isfinite(t)) t = 1.0;
    t = std::min(t, std::isfinite(tmax) ? tmax : t);
    bool moved = false;
    for (int bt = 0; bt < 60 && t > 0.0; ++bt, t *= 0.5) {
      trial = s + t * dir;
      clamp(trial, lo, hi);
      ds = trial - s;
      const double slope = grad.dot(ds);
      if (slope >= 0.0) continue;
      q.hess_vec(ds, hds);
      const double dq = slope + 0.5 * ds.dot(hds);
      if (dq <= 1e-4 * slope) {
        s = trial;
        hs += hds;
        qval += dq;
        moved = true;
        break;
      }
    }
    if (!moved) break;

    // Truncated CG on the variables strictly inside the box.
    auto mask = [&](Vector& v) {
      for (int i = 0; i < n; ++i) {
        if (s[i] <= lo[i] || s[i] >= hi[i]) v[i] = 0.0;
      }
    };
    r = -(q.g + hs);
    mask(r);
    double rr = r.squaredNorm();
    const double r0 = std::sqrt(rr);
    p = r;
    for (int it = 0; it < n && rr > 0.0; ++it) {
      q.hess_vec(p, hp);
      const double kappa = p.dot(hp);
      const double tb = step_to_boundary(s, p, lo, hi);
      const double a = kappa > 0.0 ? rr / kappa : kInf;
      if (a >= tb) {
        if (!std::isfinite(tb)) break;
        const double dq = tb * r.dot(p) * -1.0 + 0.5 * tb * tb * kappa;
        if (dq < 0.0) {
          s += tb * p;
          clamp(s, lo, hi);
          hs += tb * hp;
          qval += dq;
        }
        break;
      }
      s += a * p;
      hs += a * hp;
      qval += -a * r.dot(p) + 0.5 * a * a * kappa;
      r -= a * hp;
      mask(r);
      const double rr_new = r.squaredNorm();
      if (std::sqrt(rr_new) <= 1e-12 * r0) break;
      p = r + (rr_new / rr) * p;
      rr = rr_new;
    }
    if (q_start - qval <= 1e-15 * (1.0 + std::abs(qval))) break;
  }

  clamp(s, lo, hi);
  if (!(q.value(s) <= 0.0)) s.setZero();
  return s;
}

Vector solve_tr_box(const PolyModel& model, const Vector& center,
                    const Vector& lower, const Vector& upper, double delta) {
  const Vector lo = (lower - center).cwiseMax(-delta).cwiseMin(0.0);
  const Vector hi = (upper - center).cwiseMin(delta).cwiseMax(0.0);
  return solve_box_qp(quadratic_form(model), lo, hi);
}

}  // namespace cpsopt
