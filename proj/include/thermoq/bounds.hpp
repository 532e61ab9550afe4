#pragma once

// Upper bounds on the QFI rate of a Markovian probe: the diffusive
// condition, the fixed-Hamiltonian bound with its attaining subspace, the
// optimal-Hamiltonian bound, Lamb-shift corrected bounds with gauge freedom,
// and the qubit closed forms.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "thermoq/errors.hpp"
#include "thermoq/lindblad.hpp"
#include "thermoq/operators.hpp"
#include "thermoq/optimize.hpp"
#include "thermoq/spectral.hpp"

namespace thermoq {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Regime { no_lamb, lamb_regime_i, lamb_regime_ii };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::no_lamb: return "no-lamb";
    case Regime::lamb_regime_i: return "lamb-regime-i";
    case Regime::lamb_regime_ii: return "lamb-regime-ii";
  }
  return "?";
}

struct BoundReport {
  double rate = 0.0;
  std::optional<double> attaining_epsilon;
  std::optional<double> attaining_omega;
  std::optional<double> gauge_x;
  Regime regime = Regime::no_lamb;
  Vector certificate_state;  // optimal probe state when defined
};

struct DiffusiveCheck {
  bool simple = false;
  bool general = false;
  double simple_residual = 0.0;
  double general_residual = 0.0;
};

namespace detail {

inline Matrix gram(const Matrix& a) { return a.adjoint() * a; }

inline std::vector<HermitianOperator> simple_lamb_basis(const LindbladModel& m) {
  std::vector<HermitianOperator> basis{HermitianOperator::identity(m.dim())};
  for (const JumpChannel& c : m.channels()) {
    basis.emplace_back(c.gamma * gram(c.A));
  }
  return basis;
}

}  // namespace detail

/// Whether dH_LS/dT lies in span{1, gamma A^dag A} (simple) or in the span
/// of the full quadratic-and-linear jump basis (general).
inline DiffusiveCheck check_diffusive(const LindbladModel& m) {
  DiffusiveCheck out;
  const auto simple_basis = detail::simple_lamb_basis(m);
  const SpanResult s = span_membership(m.dH_LS_dT(), simple_basis);
  out.simple = s.in_span;
  out.simple_residual = s.residual;

  std::vector<HermitianOperator> basis{HermitianOperator::identity(m.dim())};
  const auto& ch = m.channels();
  for (const JumpChannel& c : ch) {
    const double r = std::sqrt(c.gamma);
    basis.emplace_back(r * (c.A + c.A.adjoint()));
    basis.emplace_back(r * cplx(0, 1) * (c.A - c.A.adjoint()));
  }
  for (std::size_t i = 0; i < ch.size(); ++i) {
    for (std::size_t j = i; j < ch.size(); ++j) {
      const double r = std::sqrt(ch[i].gamma * ch[j].gamma);
      const Matrix x = ch[i].A.adjoint() * ch[j].A;
      basis.emplace_back(r * (x + x.adjoint()));
      basis.emplace_back(r * cplx(0, 1) * (x - x.adjoint()));
    }
  }
  const SpanResult g = span_membership(m.dH_LS_dT(), basis);
  out.general = g.in_span;
  out.general_residual = g.residual;
  return out;
}

namespace detail {

// A channel's Gram matrix A^dag A is block diagonal when every row block of
// A (in the eigenbasis) reaches at most one column block.
inline bool gram_is_block_diagonal(const LindbladModel& m, std::size_t c) {
  const Matrix& a = m.jump_in_eigenbasis(c);
  std::vector<long> target(m.projectors().size(), -1);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (a(i, j) == cplx(0.0)) continue;
      long& t = target[m.block_of(static_cast<std::size_t>(i))];
      const long bj = static_cast<long>(m.block_of(static_cast<std::size_t>(j)));
      if (t != -1 && t != bj) return false;
      t = bj;
    }
  }
  return true;
}

/// ||sum_c coef_c A_c^dag A_c|| with the attaining block and its top
/// eigenvector. Ties between blocks go to the smaller label.
inline BoundReport block_norm_bound(const LindbladModel& m,
                                    std::span<const double> coef) {
  const ProjectorFamily& pf = m.projectors();
  const std::size_t nch = m.channels().size();
  const Eigen::Index d = static_cast<Eigen::Index>(m.dim());
  BoundReport out;

  bool divergent = false;
  for (std::size_t c = 0; c < nch; ++c) {
    if (std::isinf(coef[c])) divergent = true;
  }
  if (divergent) {
    // The smallest block on which a divergent channel acts attains.
    out.rate = kInfinity;
    for (std::size_t k = 0; k < pf.size() && !out.attaining_epsilon; ++k) {
      for (std::size_t c = 0; c < nch; ++c) {
        if (!std::isinf(coef[c])) continue;
        const auto cols = m.jump_in_eigenbasis(c).middleCols(
            pf.offset(k), pf.basis(k).cols());
        if (cols.norm() == 0.0) continue;
        Eigen::Index best = 0;
        cols.colwise().norm().maxCoeff(&best);
        out.attaining_epsilon = pf.label(k);
        out.certificate_state = pf.basis(k).col(best);
        break;
      }
    }
    return out;
  }

  bool block_diagonal = true;
  for (std::size_t c = 0; c < nch && block_diagonal; ++c) {
    if (coef[c] != 0.0) block_diagonal = gram_is_block_diagonal(m, c);
  }

  if (!block_diagonal) {
    Matrix o = Matrix::Zero(d, d);
    for (std::size_t c = 0; c < nch; ++c) {
      if (coef[c] != 0.0) o += coef[c] * gram(m.channels()[c].A);
    }
    const EigenDecomposition ed = hermitian_eig(HermitianOperator(o));
    out.rate = std::max(0.0, ed.values(ed.values.size() - 1));
    out.certificate_state = ed.vectors.col(ed.vectors.cols() - 1);
    return out;
  }

  double best = -1.0;
  for (std::size_t k = 0; k < pf.size(); ++k) {
    const Eigen::Index off = pf.offset(k);
    const Eigen::Index nk = pf.basis(k).cols();
    Matrix ok = Matrix::Zero(nk, nk);
    for (std::size_t c = 0; c < nch; ++c) {
      if (coef[c] == 0.0) continue;
      const auto cols = m.jump_in_eigenbasis(c).middleCols(off, nk);
      ok += coef[c] * (cols.adjoint() * cols);
    }
    double top = 0.0;
    Vector v;
    if (nk == 1) {
      top = ok(0, 0).real();
      v = Vector::Ones(1);
    } else {
      const EigenDecomposition ed = hermitian_eig(HermitianOperator(ok));
      top = ed.values(nk - 1);
      v = ed.vectors.col(nk - 1);
    }
    if (top > best + 1e-12 * std::max(1.0, std::abs(best))) {
      best = top;
      out.attaining_epsilon = pf.label(k);
      out.certificate_state = pf.basis(k) * v;
    }
  }
  out.rate = std::max(0.0, best);
  return out;
}

}  // namespace detail

/// ||sum_omega (gamma_dot^2/gamma) A^dag A||, ignoring the Lamb shift.
/// Divergent channels (gamma = 0, gamma_dot != 0) give an infinite rate.
inline BoundReport bound_fixed_H(const LindbladModel& m) {
  std::vector<double> coef;
  for (const JumpChannel& c : m.channels()) {
    coef.push_back(fisher_ratio({c.gamma, c.dgamma_dT}));
  }
  BoundReport r = detail::block_norm_bound(m, coef);
  r.regime = Regime::no_lamb;
  return r;
}

struct OptimalHBound {
  BoundReport report;
  double delta_T = 0.0;  // optimal level splitting, minus the best frequency
  Vector psi_opt;
};

namespace detail {

inline OptimalHBound optimal_h_from(double best_ratio, double best_omega,
                                    const HermitianOperator& A) {
  const EigenDecomposition ed = hermitian_eig(A);
  const Eigen::Index n = ed.values.size();
  const double gap = ed.values(n - 1) - ed.values(0);
  OptimalHBound out;
  out.report.rate = best_ratio * 0.25 * gap * gap;
  if (gap == 0.0) out.report.rate = 0.0;
  out.report.attaining_omega = best_omega;
  out.delta_T = -best_omega;
  out.psi_opt = (ed.vectors.col(n - 1) + ed.vectors.col(0)) / std::sqrt(2.0);
  return out;
}

}  // namespace detail

/// max_omega(gamma_dot^2/gamma) (Delta(A)/2)^2 over a discrete set of
/// frequencies, with the probe state (|a_max> + |a_min>)/sqrt 2.
inline OptimalHBound bound_optimal_H(
    std::span<const std::pair<double, ChannelRates>> bath,
    const HermitianOperator& A) {
  double best = -1.0;
  double best_w = 0.0;
  bool any = false;
  for (const auto& [w, r] : bath) {
    if (r.gamma > 0.0) any = true;
    const double v = fisher_ratio(r);
    if (v > best) {
      best = v;
      best_w = w;
    }
  }
  detail::require(any, "bound_optimal_H: all rates vanish");
  return detail::optimal_h_from(best, best_w, A);
}

/// Same bound for a bosonic bath, maximizing over signed frequencies in
/// [-cutoff, cutoff] by grid plus golden-section search.
inline OptimalHBound bound_optimal_H(const BosonicBath& bath,
                                     const HermitianOperator& A) {
  bath.validate();
  detail::require(bath.temperature > 0.0,
                  "bound_optimal_H: all rates vanish at T = 0");
  const double lo = 1e-6 * bath.density.cutoff;
  const double hi = bath.density.cutoff;
  optimize::Extremum1D best{0.0, -1.0};
  for (double sign : {-1.0, 1.0}) {
    const auto e = optimize::grid_golden_maximize(
        [&](double x) { return fisher_ratio(bath.rates(sign * x)); }, lo, hi);
    if (e.value > best.value) best = {sign * e.x, e.value};
  }
  return detail::optimal_h_from(best.value, best.x, A);
}

/// Gauge coefficients for the Lamb-shift bound: dH_LS/dT =
/// h_identity 1 + sum_c h[c] A_c^dag A_c, one h per model channel.
struct LambGauge {
  double h_identity = 0.0;
  std::vector<double> h;
};

/// h_omega = s_dot_omega, read from the channels of a microscopic model.
inline LambGauge natural_lamb_gauge(const LindbladModel& m) {
  LambGauge g;
  for (const JumpChannel& c : m.channels()) g.h.push_back(c.ds_dT);
  return g;
}

namespace detail {

inline double lamb_coefficient(const JumpChannel& c, double h) {
  if (c.gamma > 0.0) {
    return (c.dgamma_dT * c.dgamma_dT + 4.0 * h * h) / c.gamma;
  }
  return (c.dgamma_dT == 0.0 && h == 0.0) ? 0.0 : kInfinity;
}

inline double lamb_rate_for(const LindbladModel& m,
                            std::span<const double> h) {
  std::vector<double> coef;
  for (std::size_t c = 0; c < m.channels().size(); ++c) {
    coef.push_back(lamb_coefficient(m.channels()[c], h[c]));
  }
  return block_norm_bound(m, coef).rate;
}

}  // namespace detail

/// ||sum_omega ((gamma_dot^2 + 4 h^2)/gamma) A^dag A|| for a decomposition
/// of dH_LS/dT that must reproduce it to the span tolerance.
inline BoundReport bound_with_lamb(const LindbladModel& m,
                                   const LambGauge& gauge) {
  const auto& ch = m.channels();
  detail::require(gauge.h.size() == ch.size(),
                  "bound_with_lamb: one gauge coefficient per channel");
  Matrix rebuilt = gauge.h_identity *
                   Matrix::Identity(static_cast<Eigen::Index>(m.dim()),
                                    static_cast<Eigen::Index>(m.dim()));
  for (std::size_t c = 0; c < ch.size(); ++c) {
    rebuilt += gauge.h[c] * detail::gram(ch[c].A);
  }
  const double target = m.dH_LS_dT().matrix().norm();
  const double residual = (rebuilt - m.dH_LS_dT().matrix()).norm();
  detail::require(residual <= kSpanTolerance * std::max(target, 1e-300) ||
                      residual == 0.0,
                  "bound_with_lamb: gauge does not reproduce dH_LS/dT");
  std::vector<double> coef;
  for (std::size_t c = 0; c < ch.size(); ++c) {
    coef.push_back(detail::lamb_coefficient(ch[c], gauge.h[c]));
  }
  BoundReport r = detail::block_norm_bound(m, coef);
  r.regime = Regime::no_lamb;
  return r;
}

struct OptimizedLamb {
  BoundReport report;
  LambGauge gauge;
};

/// Lamb-shift bound minimized over every admissible gauge: channels with
/// gamma = 0 are pinned to h = 0 and the remaining freedom is the null
/// space of {1, A^dag A}. The objective is convex; coordinate golden-section
/// over the null-space coordinates.
inline OptimizedLamb bound_with_lamb_optimized(const LindbladModel& m) {
  const auto& ch = m.channels();
  std::vector<std::size_t> active;
  std::vector<HermitianOperator> basis{HermitianOperator::identity(m.dim())};
  for (std::size_t c = 0; c < ch.size(); ++c) {
    if (ch[c].gamma > 0.0) {
      active.push_back(c);
      basis.emplace_back(detail::gram(ch[c].A));
    }
  }
  const SpanResult s = span_membership(m.dH_LS_dT(), basis);
  if (!s.in_span) {
    OptimizedLamb out;
    out.report.rate = kInfinity;
    return out;
  }
  const RealMatrix a = detail::real_span_matrix(basis, m.dim());
  Eigen::JacobiSVD<RealMatrix> svd(a, Eigen::ComputeFullV);
  const RealVector sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1e-10 * std::max(1.0, smax)) ++rank;
  }
  const RealMatrix null = svd.matrixV().rightCols(a.cols() - rank);
  const RealVector c0 =
      Eigen::Map<const RealVector>(s.coefficients.data(), s.coefficients.size());

  auto gauge_of = [&](const RealVector& z) {
    const RealVector c = c0 + null * z;
    LambGauge g;
    g.h_identity = c(0);
    g.h.assign(ch.size(), 0.0);
    for (std::size_t k = 0; k < active.size(); ++k) {
      g.h[active[k]] = c(static_cast<Eigen::Index>(k + 1));
    }
    return g;
  };
  auto objective = [&](const RealVector& z) {
    const LambGauge g = gauge_of(z);
    return detail::lamb_rate_for(m, g.h);
  };

  RealVector z = RealVector::Zero(null.cols());
  double span = 1.0;
  for (double v : s.coefficients) span = std::max(span, 10.0 * std::abs(v));
  double current = objective(z);
  for (int sweep = 0; sweep < 200 && null.cols() > 0; ++sweep) {
    const double before = current;
    for (Eigen::Index k = 0; k < z.size(); ++k) {
      const double centre = z(k);
      const auto e = optimize::golden_section_maximize(
          [&](double x) {
            RealVector zz = z;
            zz(k) = x;
            return -objective(zz);
          },
          centre - span, centre + span, 1e-12 * span);
      if (-e.value <= current) {
        z(k) = e.x;
        current = -e.value;
      }
    }
    if (before - current <= 1e-14 * std::max(1.0, current)) break;
  }
  OptimizedLamb out;
  out.gauge = gauge_of(z);
  out.report = bound_with_lamb(m, out.gauge);
  return out;
}

/// Closed-form min over x of max{f_+(x), f_-(x)} with
///   f_+(x) = (g^2 + 4(s - x)^2)/gamma_w, f_-(x) = (g^2 + 4(s + x)^2)/gamma_-w,
/// g = gamma_dot, s = s_dot_w.
inline BoundReport qubit_bound_opt_gauge(double gamma_w, double gamma_mw,
                                         double gamma_dot, double s_dot) {
  detail::require(gamma_w > 0.0, "qubit_bound_opt_gauge: gamma_w must be > 0");
  detail::require(gamma_mw >= 0.0 && gamma_mw <= gamma_w,
                  "qubit_bound_opt_gauge: need 0 <= gamma_-w <= gamma_w");
  const double s = std::abs(s_dot);
  const double sign = s_dot < 0.0 ? -1.0 : 1.0;
  const double g2 = gamma_dot * gamma_dot;
  BoundReport r;
  const double regime_i_rate = gamma_mw > 0.0 ? g2 / gamma_mw
                               : g2 == 0.0    ? 0.0
                                              : kInfinity;
  if (regime_i_rate >= (g2 + 16.0 * s * s) / gamma_w) {
    r.rate = regime_i_rate;
    r.gauge_x = -s_dot;
    r.regime = Regime::lamb_regime_i;
    return r;
  }
  const double d = gamma_w - gamma_mw;
  const double S = gamma_w + gamma_mw;
  const double root = std::sqrt(std::max(
      0.0, 64.0 * s * s * gamma_w * gamma_mw - 4.0 * d * d * g2));
  const double den = 4.0 * s * S + root;
  const double x = -d * (4.0 * s * s + g2) / den;
  r.rate = 16.0 * s * (4.0 * s * s + g2) / den;
  r.gauge_x = sign * x;
  r.regime = Regime::lamb_regime_ii;
  return r;
}

/// 2 pi g N^3 e^{2w/T} w^{2+alpha} / T^4.
inline double qubit_explicit_bound(double w, double T, const OhmicDensity& J) {
  J.validate();
  detail::require(w > 0.0 && w <= J.cutoff,
                  "qubit_explicit_bound: need 0 < w <= cutoff");
  detail::require(T > 0.0, "qubit_explicit_bound: temperature must be > 0");
  const double n = bose_occupation(w, T);
  if (n == 0.0) return 0.0;
  const double n3e2 = std::exp(3.0 * std::log(n) + 2.0 * w / T);
  return 2.0 * std::numbers::pi * J.coupling * n3e2 *
         std::pow(w, 2.0 + J.ohmicity) / std::pow(T, 4.0);
}

struct OhmicityBound {
  double rate = 0.0;
  bool attained_by_emission = true;
  // Same number under the swapped labeling in which the emission rate is
  // called gamma_-w.
  double rate_swapped_labels = 0.0;
};

/// d gamma/d alpha = gamma ln w for both channels, so the bound is
/// (ln w)^2 max(gamma_w, gamma_-w).
inline OhmicityBound ohmicity_bound(double w, double gamma_w,
                                    double gamma_mw) {
  detail::require(w > 0.0, "ohmicity_bound: frequency must be > 0");
  detail::require(gamma_w >= 0.0 && gamma_mw >= 0.0,
                  "ohmicity_bound: rates must be >= 0");
  const double l = std::log(w);
  OhmicityBound out;
  out.attained_by_emission = gamma_w >= gamma_mw;
  out.rate = l * l * std::max(gamma_w, gamma_mw);
  out.rate_swapped_labels = out.rate;
  return out;
}

inline OhmicityBound ohmicity_bound(double w, double T,
                                    const OhmicDensity& J) {
  const BathResponse r = jump_rates(w, T, J);
  return ohmicity_bound(w, r.gamma_plus, r.gamma_minus);
}

}  // namespace thermoq
