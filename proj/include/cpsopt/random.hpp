#ifndef CPSOPT_RANDOM_HPP_
#define CPSOPT_RANDOM_HPP_

#include "cpsopt/problem.hpp"

#include <cstdint>
#include <random>

namespace cpsopt {

// Seeded random stream.  One per run; every stochastic decision of a run
// draws from it in a fixed order, which makes runs reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * unit_(engine_);
  }
  Vector normal_vector(int dim);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

// Orthonormal directions drawn lazily: column j is the j-th Gram-Schmidt
// vector of a matrix of independent standard normal columns (QR with a
// positive diagonal in R).  Columns are generated on first access, so a poll
// that stops after two directions never pays for the other n - 2.
class LazyOrthonormalBasis {
 public:
  LazyOrthonormalBasis(int dim, Rng& rng);

  int dim() const { return dim_; }
  // Valid until the next call that generates new columns.
  Eigen::Ref<const Vector> column(int j);

 private:
  void extend();

  int dim_;
  int filled_ = 0;
  Rng* rng_;
  Matrix q_;
};

Matrix random_orthonormal_basis(int dim, Rng& rng);

}  // namespace cpsopt

#endif  // CPSOPT_RANDOM_HPP_
