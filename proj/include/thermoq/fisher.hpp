#pragma once

// Classical Fisher information of outcome distributions and quantum Fisher
// information via the symmetric logarithmic derivative.

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "thermoq/errors.hpp"
#include "thermoq/lindblad.hpp"
#include "thermoq/operators.hpp"

namespace thermoq {

inline constexpr double kZeroProbability = 1e-14;
inline constexpr double kZeroDerivative = 1e-12;
inline constexpr double kSupportCutoff = 1e-12;
inline constexpr double kSupportLeak = 1e-8;

/// Probabilities and their temperature derivatives. Normalization checks are
/// relative to the magnitude of the entries.
class OutcomeDistribution {
 public:
  OutcomeDistribution(std::vector<double> p, std::vector<double> dp_dT)
      : p_(std::move(p)), dp_(std::move(dp_dT)) {
    detail::require(!p_.empty() && p_.size() == dp_.size(),
                    "OutcomeDistribution: size mismatch");
    double sp = 0.0, sdp = 0.0, adp = 0.0;
    for (std::size_t i = 0; i < p_.size(); ++i) {
      detail::require(std::isfinite(p_[i]) && std::isfinite(dp_[i]),
                      "OutcomeDistribution: non-finite entry");
      detail::require(p_[i] >= -kZeroDerivative,
                      "OutcomeDistribution: negative probability");
      sp += p_[i];
      sdp += dp_[i];
      adp += std::abs(dp_[i]);
    }
    detail::require(std::abs(sp - 1.0) <= 1e-10,
                    "OutcomeDistribution: probabilities must sum to 1");
    detail::require(std::abs(sdp) <= 1e-10 * std::max(1.0, adp),
                    "OutcomeDistribution: derivatives must sum to 0");
  }

  std::span<const double> p() const { return p_; }
  std::span<const double> dp_dT() const { return dp_; }

 private:
  std::vector<double> p_;
  std::vector<double> dp_;
};

/// sum_x pdot_x^2 / p_x; outcomes with p ~ 0 contribute nothing when their
/// derivative also vanishes and make the information ill-defined otherwise.
inline double classical_fisher(const OutcomeDistribution& d) {
  double f = 0.0;
  for (std::size_t i = 0; i < d.p().size(); ++i) {
    const double p = d.p()[i];
    const double dp = d.dp_dT()[i];
    if (p < kZeroProbability) {
      if (std::abs(dp) < kZeroDerivative) continue;
      throw IllDefinedFisher(
          "classical_fisher: zero probability with non-zero derivative");
    }
    f += dp * dp / p;
  }
  return f;
}

struct QfiResult {
  double value = 0.0;
  Matrix sld;  // symmetric logarithmic derivative on the retained support
};

/// QFI from the SLD in the eigenbasis of rho:
///   F = sum_{l_i + l_j > cutoff} 2 |<i|drho|j>|^2 / (l_i + l_j).
inline QfiResult qfi_with_sld(const Matrix& rho, const Matrix& drho) {
  detail::require(rho.rows() == rho.cols() && drho.rows() == rho.rows() &&
                      drho.cols() == rho.cols(),
                  "qfi: dimension mismatch");
  const double scale = std::max(1.0, detail::max_abs(drho));
  detail::require(std::abs(drho.trace()) <= 1e-10 * scale,
                  "qfi: state derivative must be traceless");
  const EigenDecomposition ed = hermitian_eig(HermitianOperator(rho));
  const Matrix D = ed.vectors.adjoint() * drho * ed.vectors;
  const Eigen::Index n = rho.rows();
  Matrix L = Matrix::Zero(n, n);
  double f = 0.0;
  double leak = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double s = ed.values(i) + ed.values(j);
      const double w = std::norm(D(i, j));
      if (s > kSupportCutoff) {
        f += 2.0 * w / s;
        L(i, j) = 2.0 * D(i, j) / s;
      } else {
        leak += w;
      }
    }
  }
  if (std::sqrt(leak) > kSupportLeak) {
    throw IllDefinedFisher(
        "qfi: state derivative leaks outside the support of the state");
  }
  return {f, ed.vectors * L * ed.vectors.adjoint()};
}

inline double qfi(const Matrix& rho, const Matrix& drho) {
  return qfi_with_sld(rho, drho).value;
}

inline double qfi(const DensityOperator& rho, const Matrix& drho) {
  return qfi(rho.matrix(), drho);
}

/// F(rho_t)/t along a time grid.
inline std::vector<double> qfi_rate_vs_time(const LindbladModel& m,
                                            const DensityOperator& rho0,
                                            std::span<const double> t_grid) {
  std::vector<double> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    detail::require(t > 0.0, "qfi_rate_vs_time: times must be > 0");
    const EvolvedState s = evolve_with_sensitivity(m, rho0, t);
    out.push_back(qfi(s.rho, s.drho_dT) / t);
  }
  return out;
}

}  // namespace thermoq
