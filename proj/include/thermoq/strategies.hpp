#pragma once

// Estimation protocols and their Fisher-information rates: the continuous
// measure-and-prepare scheme and three low-temperature qubit strategies
// (Ramsey, ancilla-assisted parity, fast error detection).

#include <cmath>
#include <string>
#include <string_view>

#include "thermoq/errors.hpp"
#include "thermoq/fisher.hpp"
#include "thermoq/lindblad.hpp"
#include "thermoq/operators.hpp"
#include "thermoq/optimize.hpp"

namespace thermoq {

/// Leading-order Fisher-information rate of monitoring which subspace a
/// probe prepared in psi (inside block eps) jumps to:
///   sum_omega (gamma_dot^2/gamma) sum_{eps'' != eps} ||Pi_eps'' A_omega psi||^2.
inline double map_fisher_rate(const LindbladModel& m, const Vector& psi,
                              double eps) {
  const ProjectorFamily& pf = m.projectors();
  const std::size_t k = pf.index_of(eps);
  detail::require(psi.size() == static_cast<Eigen::Index>(m.dim()),
                  "map_fisher_rate: dimension mismatch");
  const double norm2 = psi.squaredNorm();
  detail::require(norm2 > 0.0, "map_fisher_rate: zero state");
  const Matrix& Vk = pf.basis(k);
  const Vector inside = Vk * (Vk.adjoint() * psi);
  detail::require((psi - inside).norm() <= 1e-10 * std::sqrt(norm2),
                  "map_fisher_rate: state leaks outside the prepared subspace");

  // Coordinates of psi in the block eigenbasis.
  const Eigen::Index off = pf.offset(k);
  const Eigen::Index nk = Vk.cols();
  const Vector local = Vk.adjoint() * psi;
  double rate = 0.0;
  for (std::size_t c = 0; c < m.channels().size(); ++c) {
    const JumpChannel& ch = m.channels()[c];
    const Vector out = m.jump_in_eigenbasis(c).middleCols(off, nk) * local;
    double leaving = out.squaredNorm() - out.segment(off, nk).squaredNorm();
    leaving = std::max(0.0, leaving);
    if (leaving == 0.0) continue;
    rate += fisher_ratio({ch.gamma, ch.dgamma_dT}) * leaving;
  }
  return rate / norm2;
}

/// Low-temperature qubit parameters: renormalized frequency w_tilde, decay
/// rate gamma_w and s_dot_w (so d w_tilde/dT = 2 s_dot_w).
struct QubitStrategyParams {
  double w_tilde = 1.0;
  double gamma = 1.0;
  double s_dot = 1.0;
};

namespace detail {

inline void check_strategy_args(double a, double t) {
  require(a >= 0.0 && a <= 1.0, "strategy: a must lie in [0, 1]");
  require(t >= 0.0, "strategy: time must be >= 0");
}

// Z = |1><1| - |0><0| on a probe of dimension 2, or tensored with the
// ancilla identity.
inline Matrix probe_z(bool ancilla) {
  const Matrix z = -sigma_z();
  return ancilla ? tensor(z, Matrix::Identity(2, 2)) : z;
}

}  // namespace detail

/// State of the probe (and ancilla) after time t in the no-absorption
/// regime, together with its temperature derivative, which only enters via
/// the phase: d rho/dT = -i t s_dot [Z, rho].
///
/// Without ancilla: rho = U (p_j |0><0| + |Psi><Psi|) U^dag with
/// |Psi> = sqrt(1-a)|0> + sqrt(a) e^{-gamma t/2}|1>, p_j = a(1 - e^{-gamma t}).
/// With ancilla (probe first): sqrt(1-a)|00> + sqrt(a) e^{-gamma t/2}|11>
/// plus p_j |01><01|.
inline EvolvedState qubit_closed_form_state(double a, double t,
                                            const QubitStrategyParams& p,
                                            bool ancilla) {
  detail::check_strategy_args(a, t);
  detail::require(p.gamma > 0.0, "qubit_closed_form_state: gamma must be > 0");
  const double decay = std::exp(-0.5 * p.gamma * t);
  const double pj = a * -std::expm1(-p.gamma * t);
  const Eigen::Index d = ancilla ? 4 : 2;
  Vector psi = Vector::Zero(d);
  Matrix rho = Matrix::Zero(d, d);
  if (ancilla) {
    psi(0) = std::sqrt(1.0 - a);
    psi(3) = std::sqrt(a) * decay;
    rho(1, 1) = pj;  // |01>: probe decayed, ancilla still flagged
  } else {
    psi(0) = std::sqrt(1.0 - a);
    psi(1) = std::sqrt(a) * decay;
    rho(0, 0) = pj;
  }
  rho += psi * psi.adjoint();
  const Matrix Z = detail::probe_z(ancilla);
  const Eigen::VectorXcd phases =
      (cplx(0, -0.5 * p.w_tilde * t) * Z.diagonal()).array().exp();
  const Matrix U = phases.asDiagonal();
  rho = (U * rho * U.adjoint()).eval();
  const Matrix drho = cplx(0, -t * p.s_dot) * (Z * rho - rho * Z);
  return {rho, drho};
}

/// Conditional no-jump probe state weighted by its probability, plus a
/// classical flag for the jump branch (3 x 3 direct sum).
inline EvolvedState fast_detection_state(double a, double t,
                                         const QubitStrategyParams& p) {
  detail::check_strategy_args(a, t);
  const double surv = std::exp(-p.gamma * t);
  const double q = (1.0 - a) + a * surv;
  Vector c = Vector::Zero(3);
  c(0) = std::sqrt((1.0 - a) / q);
  c(1) = std::sqrt(a * surv / q);
  Matrix rho = q * (c * c.adjoint());
  rho(2, 2) = 1.0 - q;
  Matrix Z = Matrix::Zero(3, 3);
  Z(0, 0) = -1.0;
  Z(1, 1) = 1.0;
  const Matrix drho = cplx(0, -t * p.s_dot) * (Z * rho - rho * Z);
  return {rho, drho};
}

inline double ramsey(double a, double t, const QubitStrategyParams& p = {}) {
  detail::check_strategy_args(a, t);
  return 16.0 * p.s_dot * p.s_dot * t * t * std::exp(-p.gamma * t) *
         (a - a * a);
}

inline double ancilla_parity(double a, double t,
                             const QubitStrategyParams& p = {}) {
  detail::check_strategy_args(a, t);
  return 16.0 * (1.0 - a) * a * t * t * p.s_dot * p.s_dot /
         ((1.0 - a) * std::exp(t * p.gamma) + a);
}

struct FastDetection {
  double mean_qfi = 0.0;
  double mean_duration = 0.0;
};

/// A trial ends at the first detected decay or after T_wait.
inline FastDetection fast_detection(double a, double T_wait,
                                    const QubitStrategyParams& p = {}) {
  detail::check_strategy_args(a, T_wait);
  FastDetection f;
  f.mean_qfi = ancilla_parity(a, T_wait, p);
  f.mean_duration =
      (a * -std::expm1(-p.gamma * T_wait) + (1.0 - a) * T_wait * p.gamma) /
      p.gamma;
  return f;
}

enum class StrategyKind { ramsey, ancilla, fast };

inline std::string_view to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::ramsey: return "ramsey";
    case StrategyKind::ancilla: return "ancilla";
    case StrategyKind::fast: return "fast";
  }
  return "?";
}

struct StrategyResult {
  double fi_rate = 0.0;
  double r_coefficient = 0.0;  // fi_rate gamma / s_dot^2
  double a_opt = 0.0;
  double t_opt = 0.0;
  double oracle_rate = 0.0;  // SLD QFI of the explicit state at the optimum
};

/// Closed-form Fisher-information rate of a strategy at (a, t).
inline double strategy_rate(StrategyKind k, double a, double t,
                            const QubitStrategyParams& p = {}) {
  switch (k) {
    case StrategyKind::ramsey: return ramsey(a, t, p) / t;
    case StrategyKind::ancilla: return ancilla_parity(a, t, p) / t;
    case StrategyKind::fast: {
      const FastDetection f = fast_detection(a, t, p);
      return f.mean_qfi / f.mean_duration;
    }
  }
  return 0.0;
}

/// Same rate with the QFI taken from the SLD of the explicit state.
inline double strategy_rate_oracle(StrategyKind k, double a, double t,
                                   const QubitStrategyParams& p = {}) {
  switch (k) {
    case StrategyKind::ramsey: {
      const EvolvedState s = qubit_closed_form_state(a, t, p, false);
      return qfi(s.rho, s.drho_dT) / t;
    }
    case StrategyKind::ancilla: {
      const EvolvedState s = qubit_closed_form_state(a, t, p, true);
      return qfi(s.rho, s.drho_dT) / t;
    }
    case StrategyKind::fast: {
      const EvolvedState s = fast_detection_state(a, t, p);
      return qfi(s.rho, s.drho_dT) / fast_detection(a, t, p).mean_duration;
    }
  }
  return 0.0;
}

inline constexpr double kStrategyTimeMin = 0.05;
inline constexpr double kStrategyTimeMax = 10.0;

/// Search box of the strategy optimizer (units gamma = s_dot = 1).
struct StrategyBox {
  double a_min = 0.0;
  double a_max = 1.0;
  double t_min = kStrategyTimeMin;
  double t_max = kStrategyTimeMax;
};

/// Maximizes the rate over the box by a 64 x 64 grid and coordinate
/// golden-section.
inline StrategyResult optimize_strategy(StrategyKind k,
                                        const StrategyBox& box = {}) {
  detail::require(0.0 <= box.a_min && box.a_min < box.a_max && box.a_max <= 1.0,
                  "optimize_strategy: need 0 <= a_min < a_max <= 1");
  detail::require(0.0 < box.t_min && box.t_min < box.t_max,
                  "optimize_strategy: need 0 < t_min < t_max");
  const auto best = optimize::grid_coordinate_maximize(
      [k](double a, double t) { return strategy_rate(k, a, t); }, box.a_min,
      box.a_max, box.t_min, box.t_max, 64);
  StrategyResult r;
  r.fi_rate = best.value;
  r.r_coefficient = best.value;
  r.a_opt = best.x;
  r.t_opt = best.y;
  r.oracle_rate = strategy_rate_oracle(k, best.x, best.y);
  return r;
}

}  // namespace thermoq
