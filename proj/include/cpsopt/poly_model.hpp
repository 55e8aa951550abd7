#ifndef CPSOPT_POLY_MODEL_HPP_
#define CPSOPT_POLY_MODEL_HPP_

#include "cpsopt/problem.hpp"

#include <limits>
#include <string>
#include <vector>

namespace cpsopt {

enum class DegreeClass { kLinear, kDiagonal, kQuadratic };
enum class FitMode { kMinNorm, kSubBasis };

DegreeClass parse_degree_class(const std::string& s);  // linear|diag|quad
FitMode parse_fit_mode(const std::string& s);          // minnorm|subbasis
std::string to_string(DegreeClass d);
std::string to_string(FitMode m);

// Number of natural-basis functions: d+1, 2d+1 or (d+1)(d+2)/2.
int basis_size(int dim, DegreeClass degree);

// Natural monomial basis, in order
//   1, x_1..x_d, x_1^2/2..x_d^2/2,
//   x_1x_2, .., x_{d-1}x_d, x_1x_3, .., x_{d-2}x_d, .., x_1x_d
// i.e. products grouped by increasing index distance.  The row is truncated
// to basis_size(d, degree) entries.
Vector natural_basis_row(const Vector& x, DegreeClass degree);

// Off-diagonal (i, j) pairs in natural-basis order.
std::vector<std::pair<int, int>> cross_term_order(int dim);

// m(center + s) = c + g's + s'Hs/2.  The natural-basis coefficient vector of
// m around `center` is (c, g, diag(H), off-diagonal H in cross_term_order).
struct PolyModel {
  int dim = 0;
  DegreeClass degree = DegreeClass::kQuadratic;
  Vector center;
  double c = 0.0;
  Vector g;
  Matrix h;

  static PolyModel zero(int dim, DegreeClass degree, const Vector& center);

  double value(const Vector& x) const { return value_at_step(x - center); }
  double value_at_step(const Vector& s) const {
    return c + g.dot(s) + 0.5 * s.dot(h * s);
  }
  Vector coefficients() const;
};

struct FitResult {
  PolyModel model;
  int rank = 0;           // retained singular values / selected columns
  double residual = 0.0;  // ||M z - f(Y)||_2
};

constexpr double kNoConditioningCap = std::numeric_limits<double>::infinity();

// Interpolates `values` at the rows of `points` (p x d) in the natural basis
// around `center`.  Points are shifted to the center and scaled by their
// largest infinity-norm offset before the system is formed.
//
// kMinNorm:  z = pinv(M) f with singular values below sigma_max / k_ill
//            (and below a working-precision floor) discarded.
// kSubBasis: the first p natural-basis columns that keep the system
//            nonsingular are used; the remaining coefficients are zero.
//
// Throws std::invalid_argument on an empty or fully degenerate sample set.
FitResult fit_model(const Matrix& points, const Vector& values,
                    DegreeClass degree, FitMode mode, double k_ill,
                    const Vector& center);
FitResult fit_model(const Matrix& points, const Vector& values,
                    DegreeClass degree, FitMode mode,
                    double k_ill = kNoConditioningCap);

// Lagrange polynomials l_j with l_j(y^i) = delta_ij (min-norm when p < p-bar).
// Throws std::runtime_error when the sample set is not poised.
std::vector<PolyModel> lagrange_polynomials(const Matrix& points,
                                            DegreeClass degree,
                                            const Vector& center);

namespace detail {

// Scaled interpolation system shared by fitting, regularization and
// poisedness management.
struct ScaledSystem {
  Vector center;
  double scale = 1.0;  // u = (y - center) / scale
  Matrix m;            // p x p-bar basis matrix in u
};

ScaledSystem build_system(const Matrix& points, DegreeClass degree,
                          const Vector& center);

// Basis rows of arbitrary points in the coordinates of a ScaledSystem.
Matrix basis_matrix(const Matrix& points, DegreeClass degree,
                    const Vector& center, double scale);

// Converts coefficients in scaled coordinates into a model around center.
PolyModel unscale(const Vector& z, int dim, DegreeClass degree,
                  const Vector& center, double scale);

// Truncated pseudo-inverse; `rank` receives the retained count.
Matrix pseudo_inverse(const Matrix& m, double k_ill, int* rank = nullptr);

}  // namespace detail

}  // namespace cpsopt

#endif  // CPSOPT_POLY_MODEL_HPP_
