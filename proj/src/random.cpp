#include "cpsopt/random.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace cpsopt {

Vector Rng::normal_vector(int dim) {
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = normal();
  return v;
}

LazyOrthonormalBasis::LazyOrthonormalBasis(int dim, Rng& rng)
    : dim_(dim), rng_(&rng) {
  if (dim < 1) throw std::invalid_argument("basis dimension must be >= 1");
  q_.resize(dim, std::min(dim, 4));
}

void LazyOrthonormalBasis::extend() {
  for (;;) {
    Vector v = rng_->normal_vector(dim_);
    const double norm0 = v.norm();
    // Classical Gram-Schmidt applied twice is orthogonal to working precision.
    for (int pass = 0; pass < 2; ++pass) {
      if (filled_ > 0) {
        const auto prev = q_.leftCols(filled_);
        v -= prev * (prev.transpose() * v);
      }
    }
    const double norm = v.norm();
    if (norm > 1e-8 * norm0) {
      if (filled_ == q_.cols()) {
        q_.conservativeResize(Eigen::NoChange,
                              std::min<Eigen::Index>(dim_, 2 * q_.cols()));
      }
      q_.col(filled_) = v / norm;
      ++filled_;
      return;
    }
  }
}

Eigen::Ref<const Vector> LazyOrthonormalBasis::column(int j) {
  assert(j >= 0 && j < dim_);
  while (filled_ <= j) extend();
  return q_.col(j);
}

Matrix random_orthonormal_basis(int dim, Rng& rng) {
  LazyOrthonormalBasis basis(dim, rng);
  Matrix out(dim, dim);
  for (int j = 0; j < dim; ++j) out.col(j) = basis.column(j);
  return out;
}

}  // namespace cpsopt
