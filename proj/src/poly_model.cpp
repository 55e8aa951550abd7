#include "cpsopt/poly_model.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cpsopt {

DegreeClass parse_degree_class(const std::string& s) {
  if (s == "linear") return DegreeClass::kLinear;
  if (s == "diag") return DegreeClass::kDiagonal;
  if (s == "quad") return DegreeClass::kQuadratic;
  throw std::invalid_argument("unknown degree class '" + s +
                              "' (expected linear|diag|quad)");
}

FitMode parse_fit_mode(const std::string& s) {
  if (s == "minnorm") return FitMode::kMinNorm;
  if (s == "subbasis") return FitMode::kSubBasis;
  throw std::invalid_argument("unknown fit mode '" + s +
                              "' (expected minnorm|subbasis)");
}

std::string to_string(DegreeClass d) {
  switch (d) {
    case DegreeClass::kLinear: return "linear";
    case DegreeClass::kDiagonal: return "diag";
    case DegreeClass::kQuadratic: return "quad";
  }
  return "?";
}

std::string to_string(FitMode m) {
  return m == FitMode::kMinNorm ? "minnorm" : "subbasis";
}

int basis_size(int dim, DegreeClass degree) {
  switch (degree) {
    case DegreeClass::kLinear: return dim + 1;
    case DegreeClass::kDiagonal: return 2 * dim + 1;
    case DegreeClass::kQuadratic: return (dim + 1) * (dim + 2) / 2;
  }
  return 0;
}

std::vector<std::pair<int, int>> cross_term_order(int dim) {
  std::vector<std::pair<int, int>> out;
  out.reserve(dim * (dim - 1) / 2);
  for (int offset = 1; offset < dim; ++offset) {
    for (int i = 0; i + offset < dim; ++i) out.emplace_back(i, i + offset);
  }
  return out;
}

namespace {

void fill_basis_row(const double* x, int dim, DegreeClass degree,
                    const std::vector<std::pair<int, int>>& cross,
                    double* row) {
  row[0] = 1.0;
  for (int j = 0; j < dim; ++j) row[1 + j] = x[j];
  if (degree == DegreeClass::kLinear) return;
  for (int j = 0; j < dim; ++j) row[1 + dim + j] = 0.5 * x[j] * x[j];
  if (degree == DegreeClass::kDiagonal) return;
  int col = 1 + 2 * dim;
  for (const auto& [i, j] : cross) row[col++] = x[i] * x[j];
}

}  // namespace

Vector natural_basis_row(const Vector& x, DegreeClass degree) {
  const int dim = static_cast<int>(x.size());
  Vector row(basis_size(dim, degree));
  const auto cross = degree == DegreeClass::kQuadratic
                         ? cross_term_order(dim)
                         : std::vector<std::pair<int, int>>{};
  fill_basis_row(x.data(), dim, degree, cross, row.data());
  return row;
}

PolyModel PolyModel::zero(int dim, DegreeClass degree, const Vector& center) {
  PolyModel m;
  m.dim = dim;
  m.degree = degree;
  m.center = center;
  m.g = Vector::Zero(dim);
  m.h = Matrix::Zero(dim, dim);
  return m;
}

Vector PolyModel::coefficients() const {
  Vector z(basis_size(dim, degree));
  z[0] = c;
  z.segment(1, dim) = g;
  if (degree == DegreeClass::kLinear) return z;
  for (int j = 0; j < dim; ++j) z[1 + dim + j] = h(j, j);
  if (degree == DegreeClass::kDiagonal) return z;
  int col = 1 + 2 * dim;
  for (const auto& [i, j] : cross_term_order(dim)) z[col++] = h(i, j);
  return z;
}

namespace detail {

Matrix basis_matrix(const Matrix& points, DegreeClass degree,
                    const Vector& center, double scale) {
  const int p = static_cast<int>(points.rows());
  const int dim = static_cast<int>(points.cols());
  const auto cross = degree == DegreeClass::kQuadratic
                         ? cross_term_order(dim)
                         : std::vector<std::pair<int, int>>{};
  // Row-major scratch, copied into the column-major result.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> m(
      p, basis_size(dim, degree));
  Vector u(dim);
  for (int i = 0; i < p; ++i) {
    u = (points.row(i).transpose() - center) / scale;
    fill_basis_row(u.data(), dim, degree, cross, m.row(i).data());
  }
  return m;
}

ScaledSystem build_system(const Matrix& points, DegreeClass degree,
                          const Vector& center) {
  ScaledSystem sys;
  sys.center = center;
  double scale = 0.0;
  for (int i = 0; i < points.rows(); ++i) {
    scale = std::max(scale, (points.row(i).transpose() - center)
                                .lpNorm<Eigen::Infinity>());
  }
  sys.scale = scale > 0.0 ? scale : 1.0;
  sys.m = basis_matrix(points, degree, center, sys.scale);
  return sys;
}

PolyModel unscale(const Vector& z, int dim, DegreeClass degree,
                  const Vector& center, double scale) {
  PolyModel model = PolyModel::zero(dim, degree, center);
  model.c = z[0];
  model.g = z.segment(1, dim) / scale;
  if (degree == DegreeClass::kLinear) return model;
  const double s2 = scale * scale;
  for (int j = 0; j < dim; ++j) model.h(j, j) = z[1 + dim + j] / s2;
  if (degree == DegreeClass::kDiagonal) return model;
  int col = 1 + 2 * dim;
  for (const auto& [i, j] : cross_term_order(dim)) {
    model.h(i, j) = model.h(j, i) = z[col++] / s2;
  }
  return model;
}

Matrix pseudo_inverse(const Matrix& m, double k_ill, int* rank) {
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const double smax = sigma.size() > 0 ? sigma[0] : 0.0;
  const double floor = smax * std::numeric_limits<double>::epsilon() *
                       static_cast<double>(std::max(m.rows(), m.cols()));
  const double cap = std::isfinite(k_ill) ? smax / k_ill : 0.0;
  const double cut = std::max(floor, cap);
  Vector inv = Vector::Zero(sigma.size());
  int kept = 0;
  for (int i = 0; i < sigma.size(); ++i) {
    if (sigma[i] > cut && sigma[i] > 0.0) {
      inv[i] = 1.0 / sigma[i];
      ++kept;
    }
  }
  if (rank) *rank = kept;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace detail

namespace {

void check_samples(const Matrix& points, const Vector& values) {
  if (points.rows() == 0) {
    throw std::invalid_argument("fit_model: empty sample set");
  }
  if (values.size() != points.rows()) {
    throw std::invalid_argument("fit_model: values/points size mismatch");
  }
  if (points.rows() > 1) {
    bool all_same = true;
    for (int i = 1; i < points.rows() && all_same; ++i) {
      all_same = (points.row(i) == points.row(0));
    }
    if (all_same) throw std::invalid_argument("degenerate sample set");
  }
}

// Greedy left-to-right column selection keeping the selected block of full
// column rank; stops once p columns are chosen.
std::vector<int> select_sub_basis(const Matrix& m) {
  const int p = static_cast<int>(m.rows());
  const int pbar = static_cast<int>(m.cols());
  std::vector<int> chosen;
  Matrix q(p, std::min(p, pbar));
  int filled = 0;
  for (int j = 0; j < pbar && filled < p; ++j) {
    Vector v = m.col(j);
    const double norm0 = v.norm();
    if (norm0 == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      if (filled > 0) {
        const auto prev = q.leftCols(filled);
        v -= prev * (prev.transpose() * v);
      }
    }
    const double norm = v.norm();
    if (norm <= 1e-10 * norm0) continue;
    q.col(filled++) = v / norm;
    chosen.push_back(j);
  }
  return chosen;
}

}  // namespace

FitResult fit_model(const Matrix& points, const Vector& values,
                    DegreeClass degree, FitMode mode, double k_ill,
                    const Vector& center) {
  check_samples(points, values);
  const int dim = static_cast<int>(points.cols());
  const int pbar = basis_size(dim, degree);
  if (points.rows() > pbar) {
    throw std::invalid_argument("fit_model: more samples than basis functions");
  }
  const auto sys = detail::build_system(points, degree, center);
  Vector z = Vector::Zero(pbar);
  FitResult out;
  if (mode == FitMode::kMinNorm) {
    z = detail::pseudo_inverse(sys.m, k_ill, &out.rank) * values;
  } else {
    const auto cols = select_sub_basis(sys.m);
    Matrix sub(sys.m.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) sub.col(k) = sys.m.col(cols[k]);
    Vector zs;
    if (sub.rows() == sub.cols()) {
      zs = sub.partialPivLu().solve(values);
    } else {
      zs = sub.colPivHouseholderQr().solve(values);
    }
    for (std::size_t k = 0; k < cols.size(); ++k) z[cols[k]] = zs[k];
    out.rank = static_cast<int>(cols.size());
  }
  out.residual = (sys.m * z - values).norm();
  out.model = detail::unscale(z, dim, degree, center, sys.scale);
  return out;
}

FitResult fit_model(const Matrix& points, const Vector& values,
                    DegreeClass degree, FitMode mode, double k_ill) {
  return fit_model(points, values, degree, mode, k_ill,
                   Vector::Zero(points.cols()));
}

std::vector<PolyModel> lagrange_polynomials(const Matrix& points,
                                            DegreeClass degree,
                                            const Vector& center) {
  const int p = static_cast<int>(points.rows());
  const int dim = static_cast<int>(points.cols());
  if (p == 0) throw std::invalid_argument("lagrange_polynomials: no points");
  const auto sys = detail::build_system(points, degree, center);
  int rank = 0;
  const Matrix pinv =
      detail::pseudo_inverse(sys.m, kNoConditioningCap, &rank);
  if (rank < p) {
    throw std::runtime_error("lagrange_polynomials: sample set is not poised");
  }
  std::vector<PolyModel> out;
  out.reserve(p);
  for (int j = 0; j < p; ++j) {
    out.push_back(detail::unscale(pinv.col(j), dim, degree, center, sys.scale));
  }
  return out;
}

}  // namespace cpsopt
