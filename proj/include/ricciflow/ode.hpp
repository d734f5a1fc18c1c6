#pragma once

// Embedded Dormand-Prince 5(4) integrator with the method's own
// fourth-order dense-output interpolant. Dimension is a compile-time
// constant; all accepted steps are recorded so the solution can be
// evaluated anywhere in the integrated span.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "ricciflow/common.hpp"

namespace ricciflow {

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  std::array<Vec<N>, 5> rcont{};
};

template <std::size_t N>
class DenseSolution {
 public:
  DenseSolution() = default;
  DenseSolution(double t0, const Vec<N>& y0)
      : t_begin_(t0), t_end_(t0), y0_(y0), y_end_(y0) {}

  double t_begin() const { return t_begin_; }
  double t_end() const { return t_end_; }
  const std::vector<DenseStep<N>>& steps() const { return steps_; }
  const Vec<N>& back_state() const { return y_end_; }

  void push_step(const DenseStep<N>& s) {
    steps_.push_back(s);
    t_end_ = s.t0 + s.h;
    for (std::size_t i = 0; i < N; ++i)
      y_end_[i] = s.rcont[0][i] + s.rcont[1][i];
  }

  Vec<N> eval(double t) const {
    const double span = std::max(1.0, std::abs(t_end_ - t_begin_));
    if (t < t_begin_ - 1e-12 * span || t > t_end_ + 1e-12 * span)
      throw RangeError("dense evaluation outside integrated span");
    t = std::clamp(t, t_begin_, t_end_);
    if (steps_.empty()) return y0_;
    // Last step whose interval contains t.
    auto it = std::upper_bound(
        steps_.begin(), steps_.end(), t,
        [](double tt, const DenseStep<N>& s) { return tt < s.t0; });
    if (it != steps_.begin()) --it;
    const DenseStep<N>& s = *it;
    const double theta = std::clamp((t - s.t0) / s.h, 0.0, 1.0);
    const double theta1 = 1.0 - theta;
    Vec<N> y;
    for (std::size_t i = 0; i < N; ++i) {
      y[i] = s.rcont[0][i] +
             theta * (s.rcont[1][i] +
                      theta1 * (s.rcont[2][i] +
                                theta * (s.rcont[3][i] + theta1 * s.rcont[4][i])));
    }
    return y;
  }

 private:
  double t_begin_ = 0.0, t_end_ = 0.0;
  Vec<N> y0_{};
  Vec<N> y_end_{};
  std::vector<DenseStep<N>> steps_;
};

struct OdeControls {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 0.5;
};

namespace detail {

// Butcher tableau of DOPRI5 plus the dense-output weights.
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                        a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                        a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                        a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0,
                        a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                        a76 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0,
                        e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                        e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
inline constexpr double d1 = -12715105075.0 / 11282082432.0,
                        d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0,
                        d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0,
                        d7 = 69997945.0 / 29380423.0;

}  // namespace detail

/// Integrate y' = f(t, y) from the current end of `sol` up to t1,
/// appending dense steps. `admissible(t, y)` vetoes states outside the
/// allowed region; a veto raises IntegrationError carrying the last
/// accepted time.
template <std::size_t N, class Rhs, class Admissible>
void integrate_dopri5_into(DenseSolution<N>& sol, Rhs&& f, double t0,
                           Vec<N> y, double t1, const OdeControls& ctl,
                           Admissible&& admissible) {
  using namespace detail;
  if (!(t1 >= t0)) throw RangeError("integration target precedes start");
  if (t1 == t0) return;

  double t = t0;
  double h = std::min({ctl.max_step, t1 - t0, 1e-2});
  Vec<N> k1, k2, k3, k4, k5, k6, k7, ytmp, y1, yerr;
  k1 = f(t, y);
  std::size_t nstep = 0;
  const std::size_t max_steps = 10'000'000;
  bool last = false;

  while (t < t1) {
    if (++nstep > max_steps)
      throw IntegrationError("step budget exhausted", t);
    if (t + h >= t1) {
      h = t1 - t;
      last = true;
    }

    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * a21 * k1[i];
    k2 = f(t + h / 5.0, ytmp);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = f(t + 3.0 * h / 10.0, ytmp);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = f(t + 4.0 * h / 5.0, ytmp);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = f(t + 8.0 * h / 9.0, ytmp);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] +
                h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                     a65 * k5[i]);
    k6 = f(t + h, ytmp);
    for (std::size_t i = 0; i < N; ++i)
      y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] +
                          a75 * k5[i] + a76 * k6[i]);
    k7 = f(t + h, y1);

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      yerr[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                     e6 * k6[i] + e7 * k7[i]);
      const double sc =
          ctl.abs_tol + ctl.rel_tol * std::max(std::abs(y[i]), std::abs(y1[i]));
      err += (yerr[i] / sc) * (yerr[i] / sc);
    }
    err = std::sqrt(err / static_cast<double>(N));

    if (err <= 1.0) {
      if (!admissible(t + h, y1))
        throw IntegrationError("state left the admissible region", t);
      DenseStep<N> step;
      step.t0 = t;
      step.h = h;
      for (std::size_t i = 0; i < N; ++i) {
        const double ydiff = y1[i] - y[i];
        const double bspl = h * k1[i] - ydiff;
        step.rcont[0][i] = y[i];
        step.rcont[1][i] = ydiff;
        step.rcont[2][i] = bspl;
        step.rcont[3][i] = ydiff - h * k7[i] - bspl;
        step.rcont[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] +
                                d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
      }
      sol.push_step(step);
      t += h;
      y = y1;
      k1 = k7;  // FSAL
      const double fac =
          std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
      h = std::min(h * fac, ctl.max_step);
    } else {
      last = false;
      const double fac = std::clamp(0.9 * std::pow(err, -0.2), 0.1, 1.0);
      h *= fac;
      if (!(h > 1e-14 * std::max(1.0, std::abs(t))))
        throw IntegrationError("step size underflow", t);
    }
    (void)last;
  }
}

template <std::size_t N, class Rhs>
DenseSolution<N> integrate_dopri5(Rhs&& f, double t0, const Vec<N>& y0,
                                  double t1, const OdeControls& ctl) {
  DenseSolution<N> sol(t0, y0);
  integrate_dopri5_into(sol, f, t0, y0, t1, ctl,
                        [](double, const Vec<N>&) { return true; });
  return sol;
}

}  // namespace ricciflow
