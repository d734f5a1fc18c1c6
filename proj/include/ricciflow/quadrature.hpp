#pragma once

// Composite Simpson quadrature on a recorded grid, cumulative from the
// first grid point, with a Richardson check against the half-spacing
// rule.

#include <cmath>
#include <vector>

#include "ricciflow/common.hpp"

namespace ricciflow {

/// Cumulative integral of f over the (strictly increasing) grid: the
/// i-th entry is the integral from times[0] to times[i]. Each interval
/// uses Simpson's rule with a dense midpoint evaluation.
template <class F>
std::vector<double> cumulative_integral(F&& f, const std::vector<double>& times) {
  std::vector<double> out(times.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double t0 = times[i], t1 = times[i + 1];
    const double h = t1 - t0;
    acc += h / 6.0 * (f(t0) + 4.0 * f(0.5 * (t0 + t1)) + f(t1));
    out[i + 1] = acc;
  }
  return out;
}

/// Same, but every interval is also evaluated with two half-width
/// Simpson panels and the half-spacing result is returned. The
/// Richardson error estimate of that result, |coarse - fine| / (2^4-1)
/// relative to the running magnitude, must stay within rel_tol or the
/// run is rejected.
template <class F>
std::vector<double> cumulative_integral_checked(F&& f,
                                                const std::vector<double>& times,
                                                double rel_tol = 1e-8) {
  std::vector<double> coarse = cumulative_integral(f, times);
  std::vector<double> fine(times.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double t0 = times[i], t1 = times[i + 1];
    const double tm = 0.5 * (t0 + t1);
    const double h = 0.5 * (t1 - t0);
    acc += h / 6.0 * (f(t0) + 4.0 * f(0.5 * (t0 + tm)) + f(tm));
    acc += h / 6.0 * (f(tm) + 4.0 * f(0.5 * (tm + t1)) + f(t1));
    fine[i + 1] = acc;
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double scale = std::max({1.0, std::abs(coarse[i]), std::abs(fine[i])});
    worst = std::max(worst, std::abs(coarse[i] - fine[i]) / (15.0 * scale));
  }
  if (worst > rel_tol)
    throw QuadratureError("quadrature Richardson check failed");
  return fine;
}

}  // namespace ricciflow
