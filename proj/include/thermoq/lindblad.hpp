#pragma once

// Lindblad models with labelled jump channels, their microscopic
// construction from (H, A, bath), and propagation of the state together
// with its temperature derivative.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "thermoq/errors.hpp"
#include "thermoq/operators.hpp"
#include "thermoq/spectral.hpp"

namespace thermoq {

struct JumpChannel {
  double omega = 0.0;
  Matrix A;
  double gamma = 0.0;
  double dgamma_dT = 0.0;
  double ds_dT = 0.0;  // Lamb coefficient derivative, when known
};

/// Bath data attached to one Bohr frequency.
struct BathEntry {
  double gamma = 0.0;
  double dgamma_dT = 0.0;
  double s = 0.0;
  double ds_dT = 0.0;
};

/// Frequency-keyed bath table; lookups match within the degeneracy gap.
class BathTable {
 public:
  BathTable() = default;
  BathTable(std::initializer_list<std::pair<double, BathEntry>> entries) {
    for (const auto& [w, e] : entries) insert(w, e);
  }

  void insert(double omega, const BathEntry& e) {
    for (const auto& [w, _] : entries_) {
      detail::require(std::abs(w - omega) > kDegeneracyGap,
                      "BathTable: duplicate frequency");
    }
    entries_.emplace_back(omega, e);
  }

  const BathEntry& at(double omega) const {
    for (const auto& [w, e] : entries_) {
      if (std::abs(w - omega) <= kDegeneracyGap) return e;
    }
    throw DomainError("BathTable: no bath data for Bohr frequency " +
                      std::to_string(omega));
  }

 private:
  std::vector<std::pair<double, BathEntry>> entries_;
};

/// Immutable, validated Lindblad model. Jump operators and Lamb terms are
/// also kept in the eigenbasis of the projector family, where the bounds do
/// their block bookkeeping.
class LindbladModel {
 public:
  LindbladModel(HermitianOperator H, HermitianOperator H_LS,
                HermitianOperator dH_LS_dT, ProjectorFamily projectors,
                std::vector<JumpChannel> channels)
      : H_(std::move(H)),
        H_LS_(std::move(H_LS)),
        dH_LS_dT_(std::move(dH_LS_dT)),
        projectors_(std::move(projectors)),
        channels_(std::move(channels)) {
    const std::size_t d = H_.dim();
    detail::require(H_LS_.dim() == d && dH_LS_dT_.dim() == d &&
                        projectors_.dim() == d,
                    "LindbladModel: dimension mismatch");
    U_ = projectors_.stacked_basis();
    identity_basis_ =
        detail::max_abs(U_ - Matrix::Identity(U_.rows(), U_.cols())) == 0.0;
    const std::size_t nb = projectors_.size();
    block_of_.assign(d, 0);
    for (std::size_t k = 0; k < nb; ++k) {
      const Eigen::Index off = projectors_.offset(k);
      for (Eigen::Index c = 0; c < projectors_.basis(k).cols(); ++c) {
        block_of_[static_cast<std::size_t>(off + c)] = k;
      }
    }
    // owner[i*nb + j] = channel index that uses the pair (eps_i, eps_j).
    std::vector<int> owner(nb * nb, -1);
    for (std::size_t c = 0; c < channels_.size(); ++c) {
      const JumpChannel& ch = channels_[c];
      detail::require(ch.A.rows() == static_cast<Eigen::Index>(d) &&
                          ch.A.cols() == static_cast<Eigen::Index>(d),
                      "LindbladModel: jump operator dimension mismatch");
      detail::require(ch.gamma >= 0.0 && std::isfinite(ch.gamma) &&
                          std::isfinite(ch.dgamma_dT),
                      "LindbladModel: rates must be finite and gamma >= 0");
      Matrix a = to_eigenbasis(ch.A);
      const double tol = 1e-10 * std::max(1.0, detail::max_abs(a));
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
          if (std::abs(a(i, j)) <= tol) {
            a(i, j) = 0.0;
            continue;
          }
          const std::size_t bi = block_of_[static_cast<std::size_t>(i)];
          const std::size_t bj = block_of_[static_cast<std::size_t>(j)];
          if (bi == bj) continue;
          int& o = owner[bi * nb + bj];
          detail::require(o == -1 || o == static_cast<int>(c),
                          "LindbladModel: a transition pair appears in more "
                          "than one channel");
          o = static_cast<int>(c);
        }
      }
      A_eig_.push_back(std::move(a));
    }
  }

  std::size_t dim() const { return H_.dim(); }
  const HermitianOperator& H() const { return H_; }
  const HermitianOperator& H_LS() const { return H_LS_; }
  const HermitianOperator& dH_LS_dT() const { return dH_LS_dT_; }
  const ProjectorFamily& projectors() const { return projectors_; }
  const std::vector<JumpChannel>& channels() const { return channels_; }

  /// Jump operator of channel c in the block eigenbasis.
  const Matrix& jump_in_eigenbasis(std::size_t c) const {
    return A_eig_.at(c);
  }
  /// Block index of eigenbasis column i.
  std::size_t block_of(std::size_t i) const { return block_of_.at(i); }

  Matrix to_eigenbasis(const Matrix& m) const {
    if (identity_basis_) return m;
    return U_.adjoint() * m * U_;
  }
  Matrix from_eigenbasis(const Matrix& m) const {
    if (identity_basis_) return m;
    return U_ * m * U_.adjoint();
  }

  /// Same model with the Lamb-shift Hamiltonian scaled by `factor`.
  LindbladModel with_lamb_scaled(double factor) const {
    return LindbladModel(H_, factor * H_LS_, factor * dH_LS_dT_, projectors_,
                         channels_);
  }

 private:
  HermitianOperator H_;
  HermitianOperator H_LS_;
  HermitianOperator dH_LS_dT_;
  ProjectorFamily projectors_;
  std::vector<JumpChannel> channels_;
  Matrix U_;
  bool identity_basis_ = false;
  std::vector<std::size_t> block_of_;
  std::vector<Matrix> A_eig_;
};

/// A_omega = sum_{eps'-eps=omega} Pi_eps A Pi_eps', Lamb Hamiltonian
/// sum s_omega A^dag A and its temperature derivative.
inline LindbladModel build_microscopic(
    const HermitianOperator& H, const HermitianOperator& A,
    const std::function<BathEntry(double)>& bath) {
  detail::require(H.dim() == A.dim(), "build_microscopic: dimension mismatch");
  ProjectorFamily pf = ProjectorFamily::from_hamiltonian(H);
  const Matrix U = pf.stacked_basis();
  const Matrix a = U.adjoint() * A.matrix() * U;
  const std::size_t nb = pf.size();
  const Eigen::Index d = a.rows();
  const double tol = 1e-10 * std::max(1.0, detail::max_abs(a));

  // Bohr frequency of every non-vanishing block, merged within the gap.
  std::vector<double> freqs;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < nb; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      const auto blk =
          a.block(pf.offset(i), pf.offset(j), pf.basis(i).cols(),
                  pf.basis(j).cols());
      if (blk.cwiseAbs().maxCoeff() <= tol) continue;
      pairs.emplace_back(i, j);
      freqs.push_back(pf.label(j) - pf.label(i));
    }
  }
  std::vector<double> distinct = freqs;
  std::sort(distinct.begin(), distinct.end());
  std::vector<double> groups;
  for (double f : distinct) {
    if (groups.empty() || f - groups.back() > kDegeneracyGap) {
      groups.push_back(f);
    }
  }
  auto group_of = [&](double f) {
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (std::abs(f - groups[g]) <= kDegeneracyGap) return g;
    }
    return groups.size();
  };

  std::vector<Matrix> blocks(groups.size(), Matrix::Zero(d, d));
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    const std::size_t g = group_of(freqs[p]);
    blocks[g].block(pf.offset(i), pf.offset(j), pf.basis(i).cols(),
                    pf.basis(j).cols()) =
        a.block(pf.offset(i), pf.offset(j), pf.basis(i).cols(),
                pf.basis(j).cols());
  }

  Matrix h_ls = Matrix::Zero(d, d);
  Matrix dh_ls = Matrix::Zero(d, d);
  std::vector<JumpChannel> channels;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const BathEntry e = bath(groups[g]);
    const Matrix ata = blocks[g].adjoint() * blocks[g];
    h_ls += e.s * ata;
    dh_ls += e.ds_dT * ata;
    channels.push_back({groups[g], U * blocks[g] * U.adjoint(), e.gamma,
                        e.dgamma_dT, e.ds_dT});
  }
  return LindbladModel(H, HermitianOperator(U * h_ls * U.adjoint()),
                       HermitianOperator(U * dh_ls * U.adjoint()),
                       std::move(pf), std::move(channels));
}

inline LindbladModel build_microscopic(const HermitianOperator& H,
                                       const HermitianOperator& A,
                                       const BathTable& bath) {
  return build_microscopic(
      H, A, [&bath](double w) { return bath.at(w); });
}

/// Qubit Hamiltonian (w/2)(|1><1| - |0><0|) with |0> the ground state.
inline HermitianOperator qubit_hamiltonian(double w) {
  return HermitianOperator(-0.5 * w * sigma_z());
}

/// Bath table of a qubit transition: +w is emission with
/// s_w = -(Delta_T + Delta), -w absorption with s_{-w} = Delta_T.
inline BathTable qubit_bath_table(double w, const BathResponse& r) {
  BathTable t;
  t.insert(w, {r.gamma_plus, r.dgamma_dT, -(r.delta_T + r.delta),
               -r.ddeltaT_dT});
  t.insert(-w, {r.gamma_minus, r.dgamma_dT, r.delta_T, r.ddeltaT_dT});
  return t;
}

/// Microscopic qubit model H = (w/2)(|1><1|-|0><0|), A = sigma_x.
inline LindbladModel qubit_model(double w, const BathResponse& r) {
  return build_microscopic(qubit_hamiltonian(w), HermitianOperator(sigma_x()),
                           qubit_bath_table(w, r));
}

inline LindbladModel qubit_model(double w, double T, const OhmicDensity& J,
                                 bool with_lamb = true) {
  return qubit_model(w, with_lamb ? bath_response(w, T, J)
                                  : jump_rates(w, T, J));
}

inline Matrix generator_apply(const LindbladModel& m, const Matrix& rho) {
  detail::require(rho.rows() == static_cast<Eigen::Index>(m.dim()) &&
                      rho.cols() == rho.rows(),
                  "generator_apply: dimension mismatch");
  const Matrix K = m.H().matrix() + m.H_LS().matrix();
  Matrix out = cplx(0, -1) * (K * rho - rho * K);
  for (const JumpChannel& c : m.channels()) {
    if (c.gamma == 0.0) continue;
    const Matrix ata = c.A.adjoint() * c.A;
    out += c.gamma *
           (c.A * rho * c.A.adjoint() - 0.5 * (ata * rho + rho * ata));
  }
  return out;
}

inline Matrix generator_apply(const LindbladModel& m,
                              const DensityOperator& rho) {
  return generator_apply(m, rho.matrix());
}

namespace detail {

// Column-stacked superoperators: vec(X Y Z) = (Z^T kron X) vec(Y).
inline Matrix commutator_super(const Matrix& K) {
  const Matrix I = Matrix::Identity(K.rows(), K.cols());
  return cplx(0, -1) * (tensor(I, K) - tensor(K.transpose(), I));
}

inline Matrix dissipator_super(const Matrix& A) {
  const Matrix I = Matrix::Identity(A.rows(), A.cols());
  const Matrix ata = A.adjoint() * A;
  return tensor(A.conjugate(), A) - 0.5 * tensor(I, ata) -
         0.5 * tensor(ata.transpose(), I);
}

inline Vector vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

inline Matrix unvec(const Vector& v, Eigen::Index d) {
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

}  // namespace detail

/// Liouvillian L and its temperature derivative as d^2 x d^2 matrices.
inline std::pair<Matrix, Matrix> liouvillian(const LindbladModel& m) {
  Matrix L = detail::commutator_super(m.H().matrix() + m.H_LS().matrix());
  Matrix dL = detail::commutator_super(m.dH_LS_dT().matrix());
  for (const JumpChannel& c : m.channels()) {
    if (c.gamma == 0.0 && c.dgamma_dT == 0.0) continue;
    const Matrix D = detail::dissipator_super(c.A);
    L += c.gamma * D;
    dL += c.dgamma_dT * D;
  }
  return {std::move(L), std::move(dL)};
}

struct EvolvedState {
  Matrix rho;
  Matrix drho_dT;
};

/// (rho_t, d rho_t/dT) from the block-triangular generator
/// [[L, 0], [dL/dT, L]] acting on (rho, sigma), sigma(0) = drho0_dT.
inline EvolvedState evolve_with_sensitivity(const LindbladModel& m,
                                            const Matrix& rho0, double t,
                                            const Matrix& drho0_dT) {
  detail::require(t >= 0.0, "evolve_with_sensitivity: time must be >= 0");
  const Eigen::Index d = static_cast<Eigen::Index>(m.dim());
  detail::require(rho0.rows() == d && rho0.cols() == d &&
                      drho0_dT.rows() == d && drho0_dT.cols() == d,
                  "evolve_with_sensitivity: dimension mismatch");
  if (t == 0.0) return {rho0, drho0_dT};
  const auto [L, dL] = liouvillian(m);
  const Eigen::Index n = d * d;
  Matrix G = Matrix::Zero(2 * n, 2 * n);
  G.topLeftCorner(n, n) = L;
  G.bottomLeftCorner(n, n) = dL;
  G.bottomRightCorner(n, n) = L;
  Vector x(2 * n);
  x << detail::vec(rho0), detail::vec(drho0_dT);
  const Vector y = expm_action(G, x, t);
  Matrix rho = detail::unvec(y.head(n), d);
  Matrix drho = detail::unvec(y.tail(n), d);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  drho = 0.5 * (drho + drho.adjoint()).eval();
  return {std::move(rho), std::move(drho)};
}

inline EvolvedState evolve_with_sensitivity(const LindbladModel& m,
                                            const DensityOperator& rho0,
                                            double t) {
  const Eigen::Index d = static_cast<Eigen::Index>(m.dim());
  return evolve_with_sensitivity(m, rho0.matrix(), t, Matrix::Zero(d, d));
}

}  // namespace thermoq
