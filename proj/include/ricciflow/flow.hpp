#pragma once

// Time integration of the per-class flow systems. The integrator works
// in log coordinates (ln a, ln b, ln c): the volume constraint becomes
// a linear invariant, which explicit Runge-Kutta preserves to rounding,
// and positivity holds automatically. Volume drift is still measured on
// the output samples and never projected away.

#include <array>
#include <cmath>
#include <vector>

#include "ricciflow/geometry.hpp"
#include "ricciflow/ode.hpp"

namespace ricciflow {

struct IntegratorControls {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 0.5;
  double sample_spacing = 0.01;
  double drift_ceiling = 1e-9;

  bool operator==(const IntegratorControls&) const = default;
};

inline std::vector<double> make_grid(double t0, double t1, double spacing) {
  std::vector<double> g;
  const std::size_t n =
      static_cast<std::size_t>(std::ceil((t1 - t0) / spacing - 1e-9));
  g.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) g.push_back(t0 + double(i) * spacing);
  g.push_back(t1);
  return g;
}

class FlowTrajectory {
 public:
  FlowTrajectory(BianchiClass cls, DenseSolution<3> log_dense,
                 IntegratorControls controls, double initial_volume)
      : cls_(cls),
        log_dense_(std::move(log_dense)),
        controls_(controls),
        initial_volume_(initial_volume) {
    const auto grid = make_grid(log_dense_.t_begin(), log_dense_.t_end(),
                                controls_.sample_spacing);
    samples_.reserve(grid.size());
    volume_drift_ = 0.0;
    worst_drift_time_ = grid.front();
    for (double t : grid) {
      const MetricState s = at(t);
      const double drift = std::abs(s.volume() - initial_volume_);
      if (drift > volume_drift_) {
        volume_drift_ = drift;
        worst_drift_time_ = t;
      }
      samples_.push_back(s);
    }
  }

  BianchiClass bianchi_class() const { return cls_; }
  const std::vector<MetricState>& samples() const { return samples_; }
  const IntegratorControls& controls() const { return controls_; }
  double t_begin() const { return log_dense_.t_begin(); }
  double t_end() const { return log_dense_.t_end(); }
  double initial_volume() const { return initial_volume_; }
  double volume_drift() const { return volume_drift_; }
  double worst_drift_time() const { return worst_drift_time_; }

  const MetricState& initial() const { return samples_.front(); }

  /// Dense-output evaluation anywhere in [t_begin, t_end].
  MetricState at(double t) const {
    const Vec<3> y = log_dense_.eval(t);
    return {t, std::exp(y[0]), std::exp(y[1]), std::exp(y[2])};
  }

  std::vector<double> sample_times() const {
    std::vector<double> out;
    out.reserve(samples_.size());
    for (const auto& s : samples_) out.push_back(s.t);
    return out;
  }

 private:
  BianchiClass cls_;
  DenseSolution<3> log_dense_;
  IntegratorControls controls_;
  double initial_volume_;
  std::vector<MetricState> samples_;
  double volume_drift_ = 0.0;
  double worst_drift_time_ = 0.0;
};

inline FlowTrajectory integrate(BianchiClass cls, const MetricState& initial,
                                double t_end,
                                const IntegratorControls& controls = {},
                                bool allow_unnormalized = false) {
  require_positive(initial);
  if (!(t_end > initial.t))
    throw RangeError("t_end must exceed the initial time");
  const double v0 = initial.volume();
  if (!allow_unnormalized && std::abs(v0 - 1.0) > 1e-9)
    throw PreconditionError(
        "initial state is not normalized (a*b*c != 1); normalize it or opt "
        "out explicitly");

  const Vec<3> y0 = {std::log(initial.a), std::log(initial.b),
                     std::log(initial.c)};
  auto rhs = [cls](double t, const Vec<3>& y) -> Vec<3> {
    const MetricState s{t, std::exp(y[0]), std::exp(y[1]), std::exp(y[2])};
    const auto d = flow_rhs(cls, s);
    return {d[0] / s.a, d[1] / s.b, d[2] / s.c};
  };
  // Blow-up guard: coefficients must stay within [1e-12, 1e12].
  const double box = std::log(1e12);
  auto admissible = [box](double, const Vec<3>& y) {
    return std::abs(y[0]) <= box && std::abs(y[1]) <= box &&
           std::abs(y[2]) <= box;
  };

  OdeControls ode{controls.rel_tol, controls.abs_tol, controls.max_step};
  DenseSolution<3> dense(initial.t, y0);
  integrate_dopri5_into(dense, rhs, initial.t, y0, t_end, ode, admissible);

  FlowTrajectory traj(cls, std::move(dense), controls, v0);
  if (traj.volume_drift() > controls.drift_ceiling)
    throw ConservationError("volume drift exceeded the ceiling",
                            traj.volume_drift(), traj.worst_drift_time());
  return traj;
}

/// Exact solution where one exists: the constant flow on R^3 and the
/// explicit Heisenberg solution.
inline MetricState closed_form_state(BianchiClass cls,
                                     const MetricState& initial, double t) {
  require_positive(initial);
  if (!(t >= initial.t)) throw RangeError("t must not precede the initial time");
  switch (cls) {
    case BianchiClass::Euclidean3:
      return {t, initial.a, initial.b, initial.c};
    case BianchiClass::Heisenberg: {
      if (std::abs(initial.volume() - 1.0) > 1e-9)
        throw PreconditionError("Heisenberg closed form expects a*b*c = 1");
      const double s = t - initial.t;
      const double r0 = -0.5 * initial.a * initial.a;
      const double w = 1.0 - 16.0 / 3.0 * r0 * s;
      return {t, initial.a / std::sqrt(w), initial.b * std::pow(w, 0.25),
              initial.c * std::pow(w, 0.25)};
    }
    default:
      throw NotAvailableError(std::string("no closed-form solution for ") +
                              class_name(cls));
  }
}

struct ConservationReport {
  double volume_drift;
  double worst_time;
};

inline ConservationReport conservation_report(const FlowTrajectory& traj) {
  return {traj.volume_drift(), traj.worst_drift_time()};
}

}  // namespace ricciflow
