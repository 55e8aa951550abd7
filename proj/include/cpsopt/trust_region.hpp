#ifndef CPSOPT_TRUST_REGION_HPP_
#define CPSOPT_TRUST_REGION_HPP_

#include "cpsopt/poly_model.hpp"

#include <functional>

namespace cpsopt {

struct TrustRegion {
  double delta = 1.0;
  double delta_max = 1e10;
  double delta_min = 1e-10;
  double alpha1 = 2.0;  // expansion, > 1
  double alpha2 = 0.5;  // contraction, in (0, 1)
  double eta1 = 0.01;
  double eta2 = 0.9;
};

// rho > eta2            -> min(alpha1 * delta, delta_max)
// eta1 <= rho <= eta2   -> delta
// otherwise             -> max(eps_machine, alpha2 * step_norm)
TrustRegion update_radius(const TrustRegion& tr, double rho, double step_norm);

// q(s) = g's + s'Hs/2 with H available only through products.
struct QuadraticForm {
  Vector g;
  std::function<void(const Vector& v, Vector& out)> hess_vec;

  double value(const Vector& s) const;
};

QuadraticForm quadratic_form(const PolyModel& model);

// Approximate minimizer of q over lo <= s <= hi (lo <= 0 <= hi required):
// projected-gradient Cauchy steps followed by truncated CG on the free
// variables.  Only decreasing steps are taken, so q(s) <= q(0) = 0.
Vector solve_box_qp(const QuadraticForm& q, const Vector& lo, const Vector& hi);

// Trust-region subproblem over the box
//   max(lower - center, -delta) <= s <= min(upper - center, delta).
Vector solve_tr_box(const PolyModel& model, const Vector& center,
                    const Vector& lower, const Vector& upper, double delta);

}  // namespace cpsopt

#endif  // CPSOPT_TRUST_REGION_HPP_
