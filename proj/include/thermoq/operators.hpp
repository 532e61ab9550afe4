#pragma once

// Dense complex linear algebra for small probes: validated Hermitian and
// density operators, eigendecompositions, projector families and real-span
// tests. Backed by Eigen.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "thermoq/errors.hpp"

namespace thermoq {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermiticityTolerance = 1e-12;
inline constexpr double kDensityTolerance = 1e-10;
inline constexpr double kDegeneracyGap = 1e-9;
inline constexpr double kSpanTolerance = 1e-8;

namespace detail {

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline void require_square(const Matrix& m, const char* who) {
  require(m.rows() == m.cols() && m.rows() > 0,
          std::string(who) + ": matrix must be square and non-empty");
}

}  // namespace detail

/// Hermitian matrix, symmetrized on construction. The Hermiticity check is
/// relative to the largest entry so that large collective operators pass.
class HermitianOperator {
 public:
  HermitianOperator() = default;

  explicit HermitianOperator(Matrix m) {
    detail::require_square(m, "HermitianOperator");
    const double scale = std::max(1.0, detail::max_abs(m));
    const double asym = detail::max_abs(m - m.adjoint());
    detail::require(asym <= kHermiticityTolerance * scale,
                    "HermitianOperator: matrix is not Hermitian (deviation " +
                        std::to_string(asym) + ")");
    m_ = 0.5 * (m + m.adjoint());
  }

  static HermitianOperator identity(std::size_t dim) {
    return HermitianOperator(Matrix::Identity(static_cast<Eigen::Index>(dim),
                                              static_cast<Eigen::Index>(dim)));
  }

  static HermitianOperator zero(std::size_t dim) {
    return HermitianOperator(Matrix::Zero(static_cast<Eigen::Index>(dim),
                                          static_cast<Eigen::Index>(dim)));
  }

  static HermitianOperator diagonal(std::span<const double> d) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d.size()),
                            static_cast<Eigen::Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
    }
    return HermitianOperator(std::move(m));
  }

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const { return m_; }

  HermitianOperator& operator+=(const HermitianOperator& o) {
    detail::require(o.dim() == dim(), "HermitianOperator: dimension mismatch");
    m_ += o.m_;
    return *this;
  }
  HermitianOperator& operator*=(double c) {
    m_ *= c;
    return *this;
  }
  friend HermitianOperator operator+(HermitianOperator a,
                                     const HermitianOperator& b) {
    return a += b;
  }
  friend HermitianOperator operator*(double c, HermitianOperator a) {
    return a *= c;
  }

 private:
  Matrix m_;
};

/// Positive semidefinite, unit-trace Hermitian matrix.
class DensityOperator {
 public:
  DensityOperator() = default;

  explicit DensityOperator(Matrix m) : h_(std::move(m)) {
    const cplx tr = h_.matrix().trace();
    detail::require(std::abs(tr - 1.0) <= kDensityTolerance,
                    "DensityOperator: trace must be 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(h_.matrix(),
                                             Eigen::EigenvaluesOnly);
    detail::require(es.eigenvalues().minCoeff() >= -kDensityTolerance,
                    "DensityOperator: matrix is not positive semidefinite");
  }

  static DensityOperator pure(const Vector& psi) {
    const double n = psi.norm();
    detail::require(n > 0.0, "DensityOperator::pure: zero vector");
    const Vector u = psi / n;
    return DensityOperator(u * u.adjoint());
  }

  std::size_t dim() const { return h_.dim(); }
  const Matrix& matrix() const { return h_.matrix(); }
  const HermitianOperator& hermitian() const { return h_; }

 private:
  HermitianOperator h_;
};

struct EigenDecomposition {
  RealVector values;  // ascending
  Matrix vectors;     // orthonormal columns
};

inline EigenDecomposition hermitian_eig(const Matrix& m) {
  detail::require_square(m, "hermitian_eig");
  if (m.imag().cwiseAbs().maxCoeff() == 0.0) {
    // Real symmetric input: the real solver is several times faster.
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(m.real());
    if (es.info() != Eigen::Success) {
      throw ConvergenceError("hermitian_eig: eigensolver did not converge");
    }
    return {es.eigenvalues(), es.eigenvectors().cast<cplx>()};
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) {
    throw ConvergenceError("hermitian_eig: eigensolver did not converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

inline EigenDecomposition hermitian_eig(const HermitianOperator& m) {
  return hermitian_eig(m.matrix());
}

/// Largest eigenvalue of a positive semidefinite operator.
inline double operator_norm_psd(const HermitianOperator& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.matrix(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw ConvergenceError("operator_norm_psd: eigensolver did not converge");
  }
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  detail::require(lo >= -1e-8 * std::max(1.0, hi),
                  "operator_norm_psd: operator is not positive semidefinite");
  return std::max(hi, 0.0);
}

/// e^{tG} v via Pade scaling and squaring on the dense generator.
template <class Derived, class VecDerived>
auto expm_action(const Eigen::MatrixBase<Derived>& G,
                 const Eigen::MatrixBase<VecDerived>& v, double t) {
  using Plain = typename Derived::PlainObject;
  detail::require(G.rows() == G.cols() && G.cols() == v.rows(),
                  "expm_action: dimension mismatch");
  const Plain scaled = (t * G).eval();
  const Plain e = scaled.exp();
  const auto out = (e * v).eval();
  if (!out.allFinite()) {
    throw ConvergenceError("expm_action: matrix exponential is not finite");
  }
  return out;
}

inline Matrix tensor(const Matrix& a, const Matrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

inline HermitianOperator tensor(const HermitianOperator& a,
                                const HermitianOperator& b) {
  return HermitianOperator(tensor(a.matrix(), b.matrix()));
}

/// Orthogonal resolution of the identity {Pi_eps}. Each block is stored as
/// an orthonormal column basis V_eps with Pi_eps = V_eps V_eps^dagger, so a
/// ladder of a thousand levels never materializes a thousand dense
/// projectors.
class ProjectorFamily {
 public:
  ProjectorFamily() = default;

  /// Groups the spectrum of H into eigenspaces; eigenvalues closer than
  /// `gap` to their neighbour share a block labelled by the block mean.
  static ProjectorFamily from_hamiltonian(const HermitianOperator& H,
                                          double gap = kDegeneracyGap) {
    const EigenDecomposition ed = hermitian_eig(H);
    ProjectorFamily f;
    f.dim_ = H.dim();
    const Eigen::Index n = ed.values.size();
    Eigen::Index start = 0;
    for (Eigen::Index i = 1; i <= n; ++i) {
      if (i == n || ed.values(i) - ed.values(i - 1) > gap) {
        f.labels_.push_back(ed.values.segment(start, i - start).mean());
        f.bases_.push_back(ed.vectors.middleCols(start, i - start));
        start = i;
      }
    }
    f.index_offsets();
    return f;
  }

  /// Direct construction from labelled column bases; validates
  /// orthonormality and completeness.
  static ProjectorFamily from_bases(std::vector<double> labels,
                                    std::vector<Matrix> bases) {
    detail::require(!bases.empty() && labels.size() == bases.size(),
                    "ProjectorFamily: need one label per block");
    const Eigen::Index dim = bases.front().rows();
    Eigen::Index cols = 0;
    for (const Matrix& b : bases) {
      detail::require(b.rows() == dim && b.cols() > 0,
                      "ProjectorFamily: inconsistent block shapes");
      cols += b.cols();
    }
    detail::require(cols == dim, "ProjectorFamily: blocks do not span space");
    Matrix all(dim, dim);
    Eigen::Index c = 0;
    for (const Matrix& b : bases) {
      all.middleCols(c, b.cols()) = b;
      c += b.cols();
    }
    detail::require(
        detail::max_abs(all.adjoint() * all - Matrix::Identity(dim, dim)) <=
            kDensityTolerance,
        "ProjectorFamily: blocks are not orthonormal");
    for (std::size_t i = 0; i < labels.size(); ++i) {
      for (std::size_t j = i + 1; j < labels.size(); ++j) {
        detail::require(std::abs(labels[i] - labels[j]) > kDegeneracyGap,
                        "ProjectorFamily: duplicate labels");
      }
    }
    ProjectorFamily f;
    f.dim_ = static_cast<std::size_t>(dim);
    f.labels_ = std::move(labels);
    f.bases_ = std::move(bases);
    f.index_offsets();
    return f;
  }

  /// Blocks given by dense projectors (validated idempotent, orthogonal,
  /// complete).
  static ProjectorFamily from_projectors(std::vector<double> labels,
                                         std::span<const Matrix> projectors) {
    std::vector<Matrix> bases;
    for (const Matrix& p : projectors) {
      detail::require_square(p, "ProjectorFamily");
      detail::require(detail::max_abs(p * p - p) <= kDensityTolerance &&
                          detail::max_abs(p - p.adjoint()) <= kDensityTolerance,
                      "ProjectorFamily: not an orthogonal projector");
      const EigenDecomposition ed = hermitian_eig(p);
      Eigen::Index k = 0;
      for (Eigen::Index i = 0; i < ed.values.size(); ++i) {
        if (ed.values(i) > 0.5) ++k;
      }
      bases.push_back(ed.vectors.rightCols(k));
    }
    return from_bases(std::move(labels), std::move(bases));
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return labels_.size(); }
  double label(std::size_t k) const { return labels_.at(k); }
  const std::vector<double>& labels() const { return labels_; }
  const Matrix& basis(std::size_t k) const { return bases_.at(k); }
  Matrix projector(std::size_t k) const {
    return basis(k) * basis(k).adjoint();
  }

  /// All block bases side by side: the unitary that block-diagonalizes
  /// anything commuting with the family.
  Matrix stacked_basis() const {
    Matrix all(static_cast<Eigen::Index>(dim_),
               static_cast<Eigen::Index>(dim_));
    Eigen::Index c = 0;
    for (const Matrix& b : bases_) {
      all.middleCols(c, b.cols()) = b;
      c += b.cols();
    }
    return all;
  }

  /// Column offset of block k inside stacked_basis().
  Eigen::Index offset(std::size_t k) const { return offsets_.at(k); }

  /// Index of the block labelled `eps` (within the degeneracy gap).
  std::size_t index_of(double eps, double tol = kDegeneracyGap) const {
    for (std::size_t k = 0; k < labels_.size(); ++k) {
      if (std::abs(labels_[k] - eps) <= tol) return k;
    }
    throw DomainError("ProjectorFamily: no block with label " +
                      std::to_string(eps));
  }

 private:
  std::size_t dim_ = 0;
  std::vector<double> labels_;
  std::vector<Matrix> bases_;
  std::vector<Eigen::Index> offsets_;

  void index_offsets() {
    offsets_.clear();
    Eigen::Index c = 0;
    for (const Matrix& b : bases_) {
      offsets_.push_back(c);
      c += b.cols();
    }
  }
};

struct SpanResult {
  bool in_span = false;
  double residual = 0.0;
  std::vector<double> coefficients;
};

namespace detail {

// Columns are (Re vec B_i ; Im vec B_i): the real Hilbert-Schmidt geometry.
inline RealMatrix real_span_matrix(std::span<const HermitianOperator> basis,
                                   std::size_t dim) {
  const Eigen::Index n2 = static_cast<Eigen::Index>(dim * dim);
  RealMatrix a(2 * n2, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    require(basis[i].dim() == dim, "span_membership: dimension mismatch");
    const Eigen::Map<const Vector> v(basis[i].matrix().data(), n2);
    a.col(static_cast<Eigen::Index>(i)) << v.real(), v.imag();
  }
  return a;
}

inline RealVector real_vec(const Matrix& m) {
  const Eigen::Index n2 = m.size();
  const Eigen::Map<const Vector> v(m.data(), n2);
  RealVector out(2 * n2);
  out << v.real(), v.imag();
  return out;
}

}  // namespace detail

/// Real least squares min_c ||M - sum c_i B_i||_HS. Membership means a
/// residual below kSpanTolerance * ||M||_HS (the zero operator is in every
/// span).
inline SpanResult span_membership(const HermitianOperator& m,
                                  std::span<const HermitianOperator> basis) {
  SpanResult out;
  const double norm = m.matrix().norm();
  if (basis.empty()) {
    out.residual = norm;
    out.in_span = norm == 0.0;
    return out;
  }
  const RealMatrix a = detail::real_span_matrix(basis, m.dim());
  const RealVector b = detail::real_vec(m.matrix());
  const RealVector c = a.completeOrthogonalDecomposition().solve(b);
  out.residual = (a * c - b).norm();
  out.in_span = out.residual <= kSpanTolerance * norm;
  out.coefficients.assign(c.data(), c.data() + c.size());
  return out;
}

// Pauli matrices in the computational basis {|0>, |1>}.
inline Matrix sigma_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline Matrix sigma_y() {
  Matrix m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}
inline Matrix sigma_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
/// |0><1|: lowers |1> (excited) to |0> (ground).
inline Matrix sigma_minus() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1;
  return m;
}
inline Matrix sigma_plus() { return sigma_minus().adjoint(); }

inline Vector basis_vector(std::size_t dim, std::size_t k) {
  detail::require(k < dim, "basis_vector: index out of range");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(k)) = 1.0;
  return v;
}

/// Symmetric sector of N spins, basis |n> with n excitations, n = 0..N.
/// <n|J_+|n-1> = sqrt(n (N+1-n)).
inline Matrix dicke_j_plus(std::size_t N) {
  const Eigen::Index d = static_cast<Eigen::Index>(N + 1);
  Matrix m = Matrix::Zero(d, d);
  for (Eigen::Index n = 1; n < d; ++n) {
    const double gamma_n =
        static_cast<double>(n) * static_cast<double>(static_cast<Eigen::Index>(N) + 1 - n);
    m(n, n - 1) = std::sqrt(gamma_n);
  }
  return m;
}

inline Matrix dicke_j_minus(std::size_t N) { return dicke_j_plus(N).adjoint(); }

/// J_z = diag(n - N/2).
inline Matrix dicke_j_z(std::size_t N) {
  const Eigen::Index d = static_cast<Eigen::Index>(N + 1);
  Matrix m = Matrix::Zero(d, d);
  for (Eigen::Index n = 0; n < d; ++n) {
    m(n, n) = static_cast<double>(n) - 0.5 * static_cast<double>(N);
  }
  return m;
}

/// Sum of sigma_x over all spins restricted to the symmetric sector:
/// J_+ + J_-, spectrum {-N, -N+2, ..., N}.
inline Matrix dicke_sum_sigma_x(std::size_t N) {
  const Matrix jp = dicke_j_plus(N);
  return jp + jp.adjoint();
}

}  // namespace thermoq
