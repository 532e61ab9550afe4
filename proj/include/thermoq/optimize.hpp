#pragma once

// One- and two-dimensional maximization used for the frequency, gauge and
// strategy-parameter searches. Grids and tolerances are fixed constants so
// that every scan is reproducible bit for bit.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "thermoq/errors.hpp"

namespace thermoq::optimize {

inline constexpr std::size_t kDefaultGridPoints = 256;
inline constexpr double kDefaultTolerance = 1e-10;

struct Extremum1D {
  double x = 0.0;
  double value = 0.0;
};

struct Extremum2D {
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
};

/// Golden-section search for a maximum of a unimodal function on [lo, hi].
template <class F>
Extremum1D golden_section_maximize(F&& f, double lo, double hi,
                                   double tol = kDefaultTolerance) {
  detail::require(lo <= hi, "golden_section_maximize: empty interval");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int iterations = 0;
  while (b - a > tol) {
    if (++iterations > 400) {
      throw ConvergenceError("golden_section_maximize: iteration limit");
    }
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  Extremum1D best{0.5 * (a + b), f(0.5 * (a + b))};
  // The bracket ends may beat the midpoint when the maximum sits on a
  // boundary of the original interval.
  for (double x : {lo, hi}) {
    if (x >= a - tol && x <= b + tol) {
      const double v = f(x);
      if (v > best.value) best = {x, v};
    }
  }
  if (!std::isfinite(best.value)) {
    throw ConvergenceError("golden_section_maximize: non-finite objective");
  }
  return best;
}

/// Coarse uniform grid followed by golden-section refinement of the best
/// grid cell. Works for objectives that are unimodal on the scale of the grid.
template <class F>
Extremum1D grid_golden_maximize(F&& f, double lo, double hi,
                                std::size_t points = kDefaultGridPoints,
                                double tol = kDefaultTolerance) {
  detail::require(points >= 3, "grid_golden_maximize: need >= 3 grid points");
  detail::require(lo < hi, "grid_golden_maximize: empty interval");
  const double step = (hi - lo) / static_cast<double>(points - 1);
  std::size_t best_i = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points; ++i) {
    const double v = f(lo + step * static_cast<double>(i));
    if (v > best_v) {
      best_v = v;
      best_i = i;
    }
  }
  const double a = lo + step * static_cast<double>(best_i == 0 ? 0 : best_i - 1);
  const double b =
      lo + step * static_cast<double>(best_i + 1 >= points ? points - 1
                                                             : best_i + 1);
  Extremum1D refined = golden_section_maximize(f, a, b, tol);
  if (refined.value < best_v) {
    refined = {lo + step * static_cast<double>(best_i), best_v};
  }
  return refined;
}

/// Nested search over a box: a points x points grid, then alternating
/// golden-section sweeps along each coordinate until the argmax moves by
/// less than tol or a sweep no longer improves the value. Near a smooth
/// maximum the argmax is only resolved to about sqrt(machine epsilon), so
/// the value test is what usually ends the search.
template <class F>
Extremum2D grid_coordinate_maximize(F&& f, double x_lo, double x_hi,
                                    double y_lo, double y_hi,
                                    std::size_t points = 64,
                                    double tol = kDefaultTolerance) {
  detail::require(x_lo < x_hi && y_lo < y_hi,
                  "grid_coordinate_maximize: empty box");
  const double hx = (x_hi - x_lo) / static_cast<double>(points - 1);
  const double hy = (y_hi - y_lo) / static_cast<double>(points - 1);
  Extremum2D best{x_lo, y_lo, -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < points; ++i) {
    for (std::size_t j = 0; j < points; ++j) {
      const double x = x_lo + hx * static_cast<double>(i);
      const double y = y_lo + hy * static_cast<double>(j);
      const double v = f(x, y);
      if (v > best.value) best = {x, y, v};
    }
  }
  // Local box of +-2 cells around the grid winner.
  const double bx_lo = std::max(x_lo, best.x - 2 * hx);
  const double bx_hi = std::min(x_hi, best.x + 2 * hx);
  const double by_lo = std::max(y_lo, best.y - 2 * hy);
  const double by_hi = std::min(y_hi, best.y + 2 * hy);
  for (int sweep = 0; sweep < 500; ++sweep) {
    const double y = best.y;
    const Extremum1D ex = golden_section_maximize(
        [&](double x) { return f(x, y); }, bx_lo, bx_hi, tol);
    const double x = ex.x;
    const Extremum1D ey = golden_section_maximize(
        [&](double yy) { return f(x, yy); }, by_lo, by_hi, tol);
    const double moved = std::abs(ex.x - best.x) + std::abs(ey.x - best.y);
    const double gain = ey.value - best.value;
    if (ey.value >= best.value) best = {ex.x, ey.x, ey.value};
    if (moved < tol || (sweep > 0 && gain <= 1e-15 * std::abs(best.value))) {
      return best;
    }
  }
  throw ConvergenceError("grid_coordinate_maximize: sweeps did not settle");
}

}  // namespace thermoq::optimize
