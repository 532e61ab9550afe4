#pragma once

// Bath response of a bosonic sample with a power-law spectral density:
// Bose occupation, jump rates, Lamb-shift principal-value integrals and
// their temperature derivatives.

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "thermoq/errors.hpp"

namespace thermoq {

/// J(x) = g x^alpha on (0, cutoff], zero beyond.
struct OhmicDensity {
  double coupling = 1.0;  // g
  double ohmicity = 1.0;  // alpha
  double cutoff = 5.0;    // Omega

  void validate() const {
    detail::require(coupling > 0.0, "OhmicDensity: coupling must be > 0");
    detail::require(ohmicity >= 0.0, "OhmicDensity: ohmicity must be >= 0");
    detail::require(cutoff > 0.0, "OhmicDensity: cutoff must be > 0");
  }

  double operator()(double x) const {
    if (x <= 0.0 || x > cutoff) return 0.0;
    return coupling * std::pow(x, ohmicity);
  }
};

/// Rates and Lamb coefficients of one qubit transition at frequency w.
///
/// gamma_plus is emission (proportional to 1+N), gamma_minus absorption
/// (proportional to N). s_dot is the derivative of the emission Lamb
/// coefficient s_w = -(Delta_T + Delta), i.e. s_dot = -ddeltaT_dT; the
/// absorption coefficient s_{-w} = Delta_T has derivative +ddeltaT_dT.
/// Every bound only uses s_dot squared.
struct BathResponse {
  double gamma_plus = 0.0;
  double gamma_minus = 0.0;
  double dgamma_dT = 0.0;
  double delta = 0.0;
  double delta_T = 0.0;
  double ddeltaT_dT = 0.0;
  double s_dot = 0.0;
};

struct LambShifts {
  double delta = 0.0;
  double delta_T = 0.0;
  double ddeltaT_dT = 0.0;
};

// exp(-x) underflows to zero past this point.
inline constexpr double kOccupationUnderflow = 745.0;

inline double bose_occupation(double w, double T) {
  detail::require(w > 0.0, "bose_occupation: frequency must be > 0");
  detail::require(T >= 0.0, "bose_occupation: temperature must be >= 0");
  if (T == 0.0) return 0.0;
  const double x = w / T;
  if (x > kOccupationUnderflow) return 0.0;
  return std::exp(-x) / -std::expm1(-x);
}

/// dN/dT = (w/T^2) e^{w/T} N^2, evaluated through e^{-w/T}.
inline double bose_occupation_dT(double w, double T) {
  detail::require(w > 0.0, "bose_occupation_dT: frequency must be > 0");
  detail::require(T > 0.0, "bose_occupation_dT: temperature must be > 0");
  const double x = w / T;
  if (x > kOccupationUnderflow) return 0.0;
  const double e = std::exp(-x);
  const double den = -std::expm1(-x);
  return (x / T) * (e / den) / den;
}

/// Emission/absorption rates 2 pi J(w)(1+N), 2 pi J(w) N and their common
/// temperature derivative. Only the rate fields are filled.
inline BathResponse jump_rates(double w, double T, const OhmicDensity& J) {
  J.validate();
  detail::require(w > 0.0, "jump_rates: frequency must be > 0");
  detail::require(w <= J.cutoff,
                  "jump_rates: frequency beyond cutoff (rate is zero)");
  detail::require(T >= 0.0, "jump_rates: temperature must be >= 0");
  const double two_pi_j = 2.0 * std::numbers::pi * J(w);
  const double n = bose_occupation(w, T);
  BathResponse r;
  r.gamma_plus = two_pi_j * (1.0 + n);
  r.gamma_minus = two_pi_j * n;
  r.dgamma_dT = T > 0.0 ? two_pi_j * bose_occupation_dT(w, T) : 0.0;
  return r;
}

namespace detail {

inline constexpr double kPvAbsTolerance = 1e-10;
inline constexpr double kPvRelTolerance = 1e-12;

inline double integrate_regular(const std::function<double(double)>& g,
                                double a, double b, bool singular_left) {
  if (b <= a) return 0.0;
  double error = 0.0;
  double l1 = 0.0;
  double value = 0.0;
  try {
    if (singular_left) {
      boost::math::quadrature::tanh_sinh<double> ts(15);
      value = ts.integrate(g, a, b, kPvRelTolerance, &error, &l1);
    } else {
      value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          g, a, b, 25, kPvRelTolerance, &error, &l1);
    }
  } catch (const std::exception& e) {
    throw ConvergenceError(std::string("principal_value_integral: ") +
                           e.what());
  }
  if (!std::isfinite(value) ||
      error > kPvAbsTolerance * std::max(1.0, l1)) {
    throw ConvergenceError(
        "principal_value_integral: quadrature did not reach tolerance "
        "(error estimate " + std::to_string(error) + ")");
  }
  return value;
}

}  // namespace detail

/// P int_0^cutoff f(x)/(x-w) dx by singularity subtraction:
///   int (f(x)-f(w))/(x-w) dx + f(w) ln((cutoff-w)/w).
///
/// `scale` is an optional feature width of f near x = 0 (e.g. the
/// temperature for thermal integrands); it only places a breakpoint.
inline double principal_value_integral(const std::function<double(double)>& f,
                                       double w, double cutoff,
                                       double scale = 0.0) {
  detail::require(cutoff > 0.0, "principal_value_integral: cutoff must be > 0");
  detail::require(w > 0.0 && w < cutoff,
                  "principal_value_integral: singularity must lie in (0, cutoff)");
  const double fw = f(w);
  const double h = 1e-4 * w;
  const double fprime = (f(w + h) - f(w - h)) / (2.0 * h);
  const std::function<double(double)> regular = [&](double x) {
    const double dx = x - w;
    if (std::abs(dx) < 1e-12 * w) return fprime;
    return (f(x) - fw) / dx;
  };
  // [0, c0] carries the possible x^(alpha-1) endpoint behaviour.
  double c0 = 0.5 * w;
  if (scale > 0.0) c0 = std::min(c0, 40.0 * scale);
  double total = detail::integrate_regular(regular, 0.0, c0, true);
  total += detail::integrate_regular(regular, c0, 0.5 * w, false);
  total += detail::integrate_regular(regular, 0.5 * w, cutoff, false);
  total += fw * std::log((cutoff - w) / w);
  return total;
}

namespace detail {

// J(x) N(x) and J(x) dN/dT written as x^(alpha-1) times bounded factors so
// that neither overflows as x -> 0.
inline double thermal_weight(double x, double T, const OhmicDensity& J) {
  if (x <= 0.0 || x > J.cutoff) return 0.0;
  const double y = x / T;
  if (y > kOccupationUnderflow) return 0.0;
  const double q = x / -std::expm1(-y);
  return J.coupling * std::pow(x, J.ohmicity - 1.0) * std::exp(-y) * q;
}

inline double thermal_weight_dT(double x, double T, const OhmicDensity& J) {
  if (x <= 0.0 || x > J.cutoff) return 0.0;
  const double y = x / T;
  if (y > kOccupationUnderflow) return 0.0;
  const double q = x / -std::expm1(-y);
  return J.coupling * std::pow(x, J.ohmicity - 1.0) * std::exp(-y) * q * q /
         (T * T);
}

}  // namespace detail

/// Delta, Delta_T and dDelta_T/dT for a transition at frequency w.
inline LambShifts lamb_shifts(double w, double T, const OhmicDensity& J) {
  J.validate();
  detail::require(w > 0.0 && w < J.cutoff,
                  "lamb_shifts: frequency must lie in (0, cutoff)");
  detail::require(T >= 0.0, "lamb_shifts: temperature must be >= 0");
  LambShifts out;
  out.delta = principal_value_integral([&](double x) { return J(x); }, w,
                                       J.cutoff);
  if (T == 0.0) return out;
  out.delta_T = principal_value_integral(
      [&](double x) { return detail::thermal_weight(x, T, J); }, w, J.cutoff, T);
  out.ddeltaT_dT = principal_value_integral(
      [&](double x) { return detail::thermal_weight_dT(x, T, J); }, w, J.cutoff,
      T);
  return out;
}

/// All rate and Lamb fields for a qubit transition at frequency w.
inline BathResponse bath_response(double w, double T, const OhmicDensity& J) {
  BathResponse r = jump_rates(w, T, J);
  const LambShifts l = lamb_shifts(w, T, J);
  r.delta = l.delta;
  r.delta_T = l.delta_T;
  r.ddeltaT_dT = l.ddeltaT_dT;
  r.s_dot = -l.ddeltaT_dT;
  return r;
}

/// Least-squares slope of ln|Delta_T| against ln T. Delta_T is negative at
/// low temperature, so the fit uses its magnitude and only rejects grids on
/// which it vanishes or changes sign.
inline double low_T_scaling_exponent(const OhmicDensity& J, double w,
                                     std::span<const double> T_grid) {
  detail::require(T_grid.size() >= 2,
                  "low_T_scaling_exponent: need at least two temperatures");
  std::vector<double> xs;
  std::vector<double> ys;
  int sign = 0;
  for (double T : T_grid) {
    detail::require(T > 0.0 && T <= w / 100.0,
                    "low_T_scaling_exponent: need 0 < T <= w/100");
    const double d = lamb_shifts(w, T, J).delta_T;
    const int s = (d > 0.0) - (d < 0.0);
    if (s == 0 || (sign != 0 && s != sign)) {
      throw DomainError(
          "low_T_scaling_exponent: Delta_T vanishes or changes sign on grid");
    }
    sign = s;
    xs.push_back(std::log(T));
    ys.push_back(std::log(std::abs(d)));
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

/// Rate and temperature derivative of one signed transition frequency.
struct ChannelRates {
  double gamma = 0.0;
  double dgamma_dT = 0.0;
};

/// gamma_dot^2 / gamma with the conventions used by every bound:
/// a silent channel (0, 0) contributes 0, a channel with vanishing rate but
/// non-zero derivative diverges.
inline double fisher_ratio(const ChannelRates& r) {
  if (r.gamma > 0.0) return r.dgamma_dT * r.dgamma_dT / r.gamma;
  if (r.dgamma_dT == 0.0) return 0.0;
  return std::numeric_limits<double>::infinity();
}

/// Bosonic bath seen from a probe transition of signed frequency omega:
/// omega > 0 is emission (prefactor J(omega)(1+N)), omega < 0 absorption
/// (prefactor J(|omega|) N). Frequencies beyond the cutoff are silent.
struct BosonicBath {
  OhmicDensity density;
  double temperature = 1.0;
  double rate_prefactor = 2.0 * std::numbers::pi;

  void validate() const {
    density.validate();
    detail::require(temperature >= 0.0, "BosonicBath: temperature must be >= 0");
    detail::require(rate_prefactor > 0.0,
                    "BosonicBath: rate prefactor must be > 0");
  }

  ChannelRates rates(double omega) const {
    const double x = std::abs(omega);
    if (x > density.cutoff) return {};
    if (x == 0.0) return zero_frequency_limit();
    const double pj = rate_prefactor * density(x);
    const double n = bose_occupation(x, temperature);
    const double dn =
        temperature > 0.0 ? bose_occupation_dT(x, temperature) : 0.0;
    return {omega > 0.0 ? pj * (1.0 + n) : pj * n, pj * dn};
  }

 private:
  // J(x) N(x) -> g T x^(alpha-1) as x -> 0.
  ChannelRates zero_frequency_limit() const {
    const double a = density.ohmicity;
    if (a > 1.0 || temperature == 0.0) return {};
    if (a < 1.0) {
      throw DomainError(
          "BosonicBath: zero-frequency rate diverges for ohmicity < 1");
    }
    const double pg = rate_prefactor * density.coupling;
    return {pg * temperature, pg};
  }
};

}  // namespace thermoq
