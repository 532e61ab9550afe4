#pragma once

// Deterministic generators for property tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "thermoq/operators.hpp"

namespace thermoq::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }

  Matrix complex_gaussian(Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = cplx(normal(), normal());
    }
    return m;
  }

  Vector state(Eigen::Index d) {
    Vector v = complex_gaussian(d, 1);
    return v / v.norm();
  }

  HermitianOperator hermitian(Eigen::Index d) {
    const Matrix g = complex_gaussian(d, d);
    return HermitianOperator(0.5 * (g + g.adjoint()));
  }

  /// Full-rank density matrix with eigenvalues bounded away from zero.
  Matrix density(Eigen::Index d) {
    const Matrix g = complex_gaussian(d, d);
    Matrix r = g * g.adjoint() + 0.05 * Matrix::Identity(d, d);
    r /= r.trace();
    return r;
  }

  Matrix unitary(Eigen::Index d) {
    const Matrix g = complex_gaussian(d, d);
    Eigen::HouseholderQR<Matrix> qr(g);
    return qr.householderQ() * Matrix::Identity(d, d);
  }

 private:
  std::mt19937_64 rng_;
};

inline double rel_err(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

}  // namespace thermoq::testing
