#pragma once

// N-spin probe restricted to the symmetric (Dicke) sector: birth-death
// population dynamics with temperature sensitivity, finite-monitoring
// Fisher scans, and the autonomous scheme on an interacting spectrum.

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "thermoq/bounds.hpp"
#include "thermoq/errors.hpp"
#include "thermoq/fisher.hpp"
#include "thermoq/lindblad.hpp"
#include "thermoq/operators.hpp"
#include "thermoq/optimize.hpp"
#include "thermoq/spectral.hpp"

namespace thermoq {

/// Gamma_n = n (N + 1 - n) for 1 <= n <= N, zero outside.
inline double ladder_gamma(std::size_t N, long n) {
  if (n < 1 || n > static_cast<long>(N)) return 0.0;
  return static_cast<double>(n) *
         static_cast<double>(static_cast<long>(N) + 1 - n);
}

/// Emission (down the ladder) and absorption (up) rates of the collective
/// transition.
struct LadderBath {
  ChannelRates emission;
  ChannelRates absorption;
};

inline LadderBath ladder_bath(const BosonicBath& bath, double w) {
  detail::require(w > 0.0, "ladder_bath: frequency must be > 0");
  return {bath.rates(w), bath.rates(-w)};
}

/// Populations over n = 0..N and their temperature derivatives.
struct DickeLadder {
  std::size_t N = 0;
  std::vector<double> Gamma;  // Gamma_1 .. Gamma_N
  std::vector<double> p;
  std::vector<double> dp_dT;

  static DickeLadder prepared(std::size_t N, std::size_t n) {
    detail::require(N >= 1, "DickeLadder: need N >= 1");
    detail::require(n <= N, "DickeLadder: level out of range");
    DickeLadder d;
    d.N = N;
    for (std::size_t k = 1; k <= N; ++k) {
      d.Gamma.push_back(ladder_gamma(N, static_cast<long>(k)));
    }
    d.p.assign(N + 1, 0.0);
    d.dp_dT.assign(N + 1, 0.0);
    d.p[n] = 1.0;
    return d;
  }
};

/// Tridiagonal rate matrix Q with dp/dt = Q p:
///   dp_m/dt = -p_m (g_w G_m + g_-w G_{m+1}) + g_w p_{m+1} G_{m+1}
///             + g_-w p_{m-1} G_m.
inline RealMatrix ladder_generator(std::size_t N, double gamma_w,
                                   double gamma_mw) {
  detail::require(N >= 1, "ladder_generator: need N >= 1");
  detail::require(std::isfinite(gamma_w) && std::isfinite(gamma_mw),
                  "ladder_generator: rates must be finite");
  const Eigen::Index d = static_cast<Eigen::Index>(N + 1);
  RealMatrix Q = RealMatrix::Zero(d, d);
  for (Eigen::Index m = 0; m < d; ++m) {
    const double down = gamma_w * ladder_gamma(N, m);
    const double up = gamma_mw * ladder_gamma(N, m + 1);
    Q(m, m) = -(down + up);
    if (m > 0) Q(m - 1, m) = down;
    if (m + 1 < d) Q(m + 1, m) = up;
  }
  return Q;
}

/// (p, dp/dT) after time t from the augmented generator
/// [[Q, 0], [dQ/dT, Q]].
inline DickeLadder ladder_propagate(DickeLadder state, const LadderBath& bath,
                                    double t) {
  detail::require(t >= 0.0, "ladder_propagate: time must be >= 0");
  const std::size_t N = state.N;
  const Eigen::Index d = static_cast<Eigen::Index>(N + 1);
  const RealMatrix Q =
      ladder_generator(N, bath.emission.gamma, bath.absorption.gamma);
  // Same structure with rates replaced by their derivatives (no sign
  // constraint, so build it directly).
  RealMatrix dQ = RealMatrix::Zero(d, d);
  for (Eigen::Index m = 0; m < d; ++m) {
    const double down = bath.emission.dgamma_dT * ladder_gamma(N, m);
    const double up = bath.absorption.dgamma_dT * ladder_gamma(N, m + 1);
    dQ(m, m) = -(down + up);
    if (m > 0) dQ(m - 1, m) = down;
    if (m + 1 < d) dQ(m + 1, m) = up;
  }
  RealMatrix G = RealMatrix::Zero(2 * d, 2 * d);
  G.topLeftCorner(d, d) = Q;
  G.bottomLeftCorner(d, d) = dQ;
  G.bottomRightCorner(d, d) = Q;
  RealVector x(2 * d);
  x << Eigen::Map<const RealVector>(state.p.data(), d),
      Eigen::Map<const RealVector>(state.dp_dT.data(), d);
  const RealVector y = expm_action(G, x, t);
  for (Eigen::Index i = 0; i < d; ++i) {
    state.p[static_cast<std::size_t>(i)] = y(i);
    state.dp_dT[static_cast<std::size_t>(i)] = y(d + i);
  }
  return state;
}

/// Fisher information per unit time of a level measurement after dt,
/// starting from level prepare_n, for every dt of the grid.
inline std::vector<double> ladder_fi_rate_scan(std::size_t N,
                                               std::span<const double> dt_grid,
                                               const LadderBath& bath,
                                               std::size_t prepare_n) {
  std::vector<double> out;
  out.reserve(dt_grid.size());
  const DickeLadder start = DickeLadder::prepared(N, prepare_n);
  for (double dt : dt_grid) {
    detail::require(dt > 0.0, "ladder_fi_rate_scan: dt must be > 0");
    const DickeLadder s = ladder_propagate(start, bath, dt);
    std::vector<double> p = s.p;
    for (double& v : p) v = std::max(v, 0.0);
    out.push_back(classical_fisher(OutcomeDistribution(p, s.dp_dT)) / dt);
  }
  return out;
}

/// dt -> 0 limit of the scan: Gamma_n f(w) + Gamma_{n+1} f(-w),
/// f = gamma_dot^2 / gamma.
inline double ladder_rate_limit(std::size_t N, const LadderBath& bath,
                                std::size_t n) {
  detail::require(n <= N, "ladder_rate_limit: level out of range");
  const long k = static_cast<long>(n);
  double r = 0.0;
  if (ladder_gamma(N, k) > 0.0) r += ladder_gamma(N, k) * fisher_ratio(bath.emission);
  if (ladder_gamma(N, k + 1) > 0.0) {
    r += ladder_gamma(N, k + 1) * fisher_ratio(bath.absorption);
  }
  return r;
}

/// Smallest dt at which the scan rate has dropped to half its dt -> 0
/// value (bisection in log dt).
inline double half_value_dt(std::size_t N, const LadderBath& bath,
                            std::size_t prepare_n) {
  const double target = 0.5 * ladder_rate_limit(N, bath, prepare_n);
  detail::require(target > 0.0 && std::isfinite(target),
                  "half_value_dt: limit rate must be positive and finite");
  auto rate = [&](double dt) {
    const double g[] = {dt};
    return ladder_fi_rate_scan(N, g, bath, prepare_n).front();
  };
  double lo = 1e-8;
  double hi = 1e-8;
  while (rate(hi) > target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw ConvergenceError("half_value_dt: no half-value point");
  }
  for (int i = 0; i < 200 && hi / lo - 1.0 > 1e-12; ++i) {
    const double mid = std::sqrt(lo * hi);
    (rate(mid) > target ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

/// Ladder Lindblad model H = w J_z with A_w = J_-, A_-w = J_+, injected
/// directly (no diagonalization).
inline LindbladModel dicke_model(std::size_t N, double w,
                                 const LadderBath& bath) {
  detail::require(w > 0.0, "dicke_model: frequency must be > 0");
  const std::size_t d = N + 1;
  std::vector<double> labels;
  std::vector<Matrix> bases;
  for (std::size_t n = 0; n < d; ++n) {
    labels.push_back(w * (static_cast<double>(n) - 0.5 * static_cast<double>(N)));
    bases.push_back(basis_vector(d, n));
  }
  ProjectorFamily pf = ProjectorFamily::from_bases(std::move(labels),
                                                   std::move(bases));
  const Matrix jm = dicke_j_minus(N);
  std::vector<JumpChannel> ch;
  ch.push_back({w, jm, bath.emission.gamma, bath.emission.dgamma_dT, 0.0});
  ch.push_back({-w, jm.adjoint(), bath.absorption.gamma,
                bath.absorption.dgamma_dT, 0.0});
  return LindbladModel(HermitianOperator(w * dicke_j_z(N)),
                       HermitianOperator::zero(d), HermitianOperator::zero(d),
                       std::move(pf), std::move(ch));
}

/// Ladder bound (N/2)(N/2+1)(f(w) + f(-w)) for even N.
inline double ladder_bound_closed_form(std::size_t N, const LadderBath& bath) {
  detail::require(N % 2 == 0, "ladder_bound_closed_form: N must be even");
  const double h = 0.5 * static_cast<double>(N);
  return h * (h + 1.0) *
         (fisher_ratio(bath.emission) + fisher_ratio(bath.absorption));
}

/// e_n = w (n - N/2) + b (n - N/2)^2.
inline double interacting_energy(std::size_t N, double w, double b, long n) {
  const double k = static_cast<double>(n) - 0.5 * static_cast<double>(N);
  return w * k + b * k * k;
}

/// argmin_n e_n over 0..N, ties to the smaller n.
inline std::size_t interacting_ground_index(std::size_t N, double w, double b) {
  detail::require(b > 0.0, "interacting_ground_index: b must be > 0");
  std::size_t best = 0;
  double best_e = interacting_energy(N, w, b, 0);
  for (std::size_t n = 1; n <= N; ++n) {
    const double e = interacting_energy(N, w, b, static_cast<long>(n));
    if (e < best_e - 1e-12 * std::max(1.0, std::abs(best_e))) {
      best = n;
      best_e = e;
    }
  }
  return best;
}

/// Measure-and-prepare rate from level n of the interacting spectrum:
///   Gamma_n f(e_n - e_{n-1}) + Gamma_{n+1} f(e_n - e_{n+1}),
/// with f evaluated on the bath at the signed transition frequency.
inline double autonomous_fi_rate_at(std::size_t N, double w, double b,
                                    const BosonicBath& bath, std::size_t n) {
  detail::require(n <= N, "autonomous_fi_rate: level out of range");
  const long k = static_cast<long>(n);
  const double en = interacting_energy(N, w, b, k);
  double r = 0.0;
  if (ladder_gamma(N, k) > 0.0) {
    r += ladder_gamma(N, k) *
         fisher_ratio(bath.rates(en - interacting_energy(N, w, b, k - 1)));
  }
  if (ladder_gamma(N, k + 1) > 0.0) {
    r += ladder_gamma(N, k + 1) *
         fisher_ratio(bath.rates(en - interacting_energy(N, w, b, k + 1)));
  }
  return r;
}

/// Two-gap rate with |psi_{N/2}> as the ground level; requires b > w.
inline double autonomous_fi_rate(std::size_t N, double w, double b,
                                 const BosonicBath& bath) {
  detail::require(N % 2 == 0, "autonomous_fi_rate: N must be even");
  detail::require(b > w, "autonomous_fi_rate: closed form needs b > w");
  return autonomous_fi_rate_at(N, w, b, bath, N / 2);
}

/// Rate from the actual ground level n* of the interacting spectrum.
inline double autonomous_fi_rate_ground(std::size_t N, double w, double b,
                                        const BosonicBath& bath) {
  return autonomous_fi_rate_at(N, w, b, bath,
                               interacting_ground_index(N, w, b));
}

struct AutonomousOptimum {
  double rate = 0.0;
  double b_opt = 0.0;
};

/// w = 0: both gaps equal -b, so the rate is (1/2)(N^2 + 2N) f(-b),
/// maximized over b with the same search as the optimal-H bound.
inline AutonomousOptimum autonomous_w0_optimum(std::size_t N,
                                               const BosonicBath& bath) {
  detail::require(N % 2 == 0, "autonomous_w0_optimum: N must be even");
  bath.validate();
  const double lo = 1e-6 * bath.density.cutoff;
  const double hi = bath.density.cutoff;
  const auto e = optimize::grid_golden_maximize(
      [&](double x) { return fisher_ratio(bath.rates(-x)); }, lo, hi);
  const double n = static_cast<double>(N);
  return {0.5 * (n * n + 2.0 * n) * e.value, e.x};
}

}  // namespace thermoq
