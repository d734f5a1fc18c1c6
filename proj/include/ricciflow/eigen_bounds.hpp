#pragma once

// Computable objects built from the eigenvalue evolution equation
//   d(lambda)/dt = 2 * sum_i q_i w_i - (2/3) R lambda,
// where the q_i are diagonal Ricci quantities and the weights w_i
// abstract the eigenfunction gradient integrals. Provides pointwise
// reaction-coefficient bounds, integrated envelopes, the closed-form
// per-class bounds, reconstructed E(1,1) constants, admissible synthetic
// eigenvalue trajectories, and the monotone quantities.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "ricciflow/flow.hpp"
#include "ricciflow/geometry.hpp"
#include "ricciflow/ode.hpp"
#include "ricciflow/quadrature.hpp"

namespace ricciflow {

/// ComponentLiteral takes the reaction rates straight from the
/// lower-index components 2*r_ii; Endomorphism uses 2*r_ii/g_ii, the
/// form the Rayleigh-quotient argument suggests. They agree wherever
/// g_ii = 1.
enum class Convention { ComponentLiteral, Endomorphism };

inline const char* convention_name(Convention c) {
  return c == Convention::ComponentLiteral ? "component" : "endomorphism";
}

struct ReactionCoefficients {
  double c_lo, c_hi;
  int argmin, argmax;  // index in {0,1,2} attaining each extreme
};

inline std::array<double, 3> reaction_terms(const CurvatureData& curv,
                                            Convention convention) {
  return convention == Convention::ComponentLiteral ? curv.components()
                                                    : curv.endomorphism();
}

inline ReactionCoefficients reaction_coefficients(const MetricState&,
                                                  const CurvatureData& curv,
                                                  Convention convention) {
  const auto q = reaction_terms(curv, convention);
  int imin = 0, imax = 0;
  for (int i = 1; i < 3; ++i) {
    if (q[i] < q[imin]) imin = i;  // ties break toward the smallest index
    if (q[i] > q[imax]) imax = i;
  }
  const double r23 = 2.0 / 3.0 * curv.scalar;
  return {2.0 * q[imin] - r23, 2.0 * q[imax] - r23, imin, imax};
}

inline ReactionCoefficients reaction_at(const FlowTrajectory& traj, double t,
                                        Convention convention) {
  const MetricState s = traj.at(t);
  return reaction_coefficients(s, ricci_components(traj.bianchi_class(), s),
                               convention);
}

/// Lower/upper eigenvalue envelope anchored at (tau, lambda_tau):
/// L' = c_lo(t) L, U' = c_hi(t) U, integrated in log form with the same
/// adaptive scheme as the flow but tighter tolerances, so that
/// independently integrated extremal trajectories agree with the
/// envelope well below the acceptance slack.
class EigenEnvelope {
 public:
  double tau = 0.0;
  double lambda_tau = 1.0;
  Convention convention = Convention::ComponentLiteral;
  std::vector<double> times;
  std::vector<double> lower, upper;

  EigenEnvelope(double tau_, double lambda_tau_, Convention conv,
                DenseSolution<2> logs)
      : tau(tau_), lambda_tau(lambda_tau_), convention(conv),
        logs_(std::move(logs)) {}

  double lower_at(double t) const { return std::exp(logs_.eval(t)[0]); }
  double upper_at(double t) const { return std::exp(logs_.eval(t)[1]); }

 private:
  DenseSolution<2> logs_;
};

inline std::vector<double> envelope_grid(const FlowTrajectory& traj,
                                         double tau) {
  if (tau < traj.t_begin() - 1e-12 || tau > traj.t_end() + 1e-12)
    throw RangeError("tau lies outside the trajectory span");
  std::vector<double> grid;
  grid.push_back(tau);
  for (double t : traj.sample_times())
    if (t > tau + 1e-12) grid.push_back(t);
  return grid;
}

namespace detail {

inline OdeControls envelope_ode_controls(const FlowTrajectory& traj) {
  return {1e-12, 1e-14, traj.controls().max_step};
}

// Shared integration of d(ln L)/dt = c_lo, d(ln U)/dt = c_hi. The
// extremal synthetic trajectories solve the same equations, so they
// reuse this and agree with the envelope exactly.
inline DenseSolution<2> integrate_reaction_pair(const FlowTrajectory& traj,
                                                double tau, double lambda_tau,
                                                Convention convention) {
  auto rhs = [&](double t, const Vec<2>&) -> Vec<2> {
    const auto rc = reaction_at(traj, t, convention);
    return {rc.c_lo, rc.c_hi};
  };
  const double l0 = std::log(lambda_tau);
  DenseSolution<2> logs(tau, {l0, l0});
  if (traj.t_end() > tau)
    integrate_dopri5_into(logs, rhs, tau, Vec<2>{l0, l0}, traj.t_end(),
                          envelope_ode_controls(traj),
                          [](double, const Vec<2>&) { return true; });
  return logs;
}

}  // namespace detail

inline EigenEnvelope envelope_integrate(const FlowTrajectory& traj, double tau,
                                        double lambda_tau,
                                        Convention convention) {
  if (!(lambda_tau > 0.0)) throw DomainError("lambda_tau must be positive");
  const auto grid = envelope_grid(traj, tau);
  EigenEnvelope env(
      tau, lambda_tau, convention,
      detail::integrate_reaction_pair(traj, tau, lambda_tau, convention));
  env.times = grid;
  env.lower.reserve(grid.size());
  env.upper.reserve(grid.size());
  for (double t : grid) {
    env.lower.push_back(env.lower_at(t));
    env.upper.push_back(env.upper_at(t));
  }
  return env;
}

// ---------------------------------------------------------------------------
// Closed-form per-class bounds.

struct TheoremBoundParams {
  BianchiClass cls = BianchiClass::SU2;
  double tau = 0.0;
  double lambda_tau = 1.0;
  // Initial (t = 0) metric coefficients, used by the SU2 / SL2R /
  // Heisenberg / E2 formulas.
  double a0 = 1.0, b0 = 1.0, c0 = 1.0;
  std::optional<double> c1, c2;  // E11 only
  std::optional<double> k;       // SL2R only, (10/3) * C(tau)^2
};

struct BoundPair {
  double lo, hi;
};

namespace detail {

// Exact Heisenberg factor for the lower-coefficient (1/3)A^2 - A^2 B.
inline double heis_lower_factor(double a0, double b0, double t) {
  const double w = 1.0 + 8.0 / 3.0 * a0 * a0 * t;
  return std::pow(w, 1.0 / 8.0) *
         std::exp(-1.5 * b0 * (std::pow(w, 0.25) - 1.0));
}

// Exact Heisenberg factor for the upper coefficient (1/3)A^2 + A^3:
// with A = A0 w^{-1/2}, integrating A^3 from 0 to t gives
// (3/4)A0 (1 - w^{-1/2}), hence the 3*A0/4 in the exponent (A0/4 would
// only bound the weaker coefficient (1/3)(A^2 + A^3)).
inline double heis_upper_factor(double a0, double t) {
  const double w = 1.0 + 8.0 / 3.0 * a0 * a0 * t;
  return std::pow(w, 1.0 / 8.0) *
         std::exp(-0.75 * a0 * (1.0 / std::sqrt(w) - 1.0));
}

// E2 upper-rate constant: c_hi = (A-B)[(1/3)(A-B) + A(A+B)] together
// with A-B <= (A0-B0) e^{-4 B0^2 t}, A <= A0, A+B <= 2 A0 gives the
// certified constant below. (A0^2 (A0-B0) alone would drop the
// A(A+B) <= 2 A0^2 factor and is not pointwise valid.)
inline double e2_upper_rate_constant(double a0, double b0) {
  return (a0 - b0) * ((a0 - b0) / 3.0 + 2.0 * a0 * a0);
}

}  // namespace detail

inline void validate_theorem_params(const TheoremBoundParams& p) {
  if (p.cls == BianchiClass::Euclidean3)
    throw ParameterError("no eigenvalue bounds for the constant flow");
  if (!(p.lambda_tau > 0.0))
    throw ParameterError("lambda_tau must be positive");
  if (!(p.a0 > 0.0 && p.b0 > 0.0 && p.c0 > 0.0))
    throw ParameterError("initial coefficients must be positive");
  if (p.cls == BianchiClass::E11) {
    if (!p.c1 || !p.c2)
      throw ParameterError("E(1,1) bounds require the constants c1 and c2");
    if (!(p.tau > 0.0))
      throw ParameterError("E(1,1) bounds require a positive anchor time");
  } else if (p.c1 || p.c2) {
    throw ParameterError("c1/c2 are only meaningful for E(1,1)");
  }
  if (p.k && p.cls != BianchiClass::SL2R)
    throw ParameterError("k is only meaningful for SL(2,R)");
}

/// Pointwise rate functions whose integrals are the closed-form bounds:
/// rate_lo(t) <= c_lo(t) and c_hi(t) <= rate_hi(t) after the class's
/// threshold time.
inline std::pair<double, double> theorem_rates(const TheoremBoundParams& p,
                                               double t) {
  validate_theorem_params(p);
  switch (p.cls) {
    case BianchiClass::SU2: {
      const double e = std::exp(-2.0 * p.c0 * p.c0 * t);
      return {-4.0 * (p.a0 - p.c0) * e, 5.0 * (p.a0 - p.c0) * e};
    }
    case BianchiClass::SL2R:
      return {-2.0, 2.0 / (p.c0 + 2.0 / 3.0 * t)};
    case BianchiClass::Heisenberg: {
      const double w = 1.0 + 8.0 / 3.0 * p.a0 * p.a0 * t;
      const double a2 = p.a0 * p.a0 / w;
      const double a3 = std::pow(a2, 1.5);
      const double b = p.b0 * std::pow(w, 0.25);
      return {a2 / 3.0 - a2 * b, a2 / 3.0 + a3};
    }
    case BianchiClass::E11:
      return {-*p.c2 / t, *p.c1 / (t * t)};
    case BianchiClass::E2: {
      const double e = std::exp(-4.0 * p.b0 * p.b0 * t);
      return {-2.0 * p.a0 * p.a0 * (p.a0 - p.b0) * e,
              detail::e2_upper_rate_constant(p.a0, p.b0) * e};
    }
    default:
      throw ParameterError("no bounds for this class");
  }
}

/// Closed-form lower/upper bounds on lambda(t); both sides are
/// proportional to lambda(tau), the SU2 case included.
inline BoundPair theorem_bounds(const TheoremBoundParams& p, double t) {
  validate_theorem_params(p);
  if (!(t >= p.tau)) throw RangeError("t must not precede tau");
  const double lt = p.lambda_tau;
  switch (p.cls) {
    case BianchiClass::SU2: {
      const double w = p.c0 * p.c0;
      const double de = std::exp(-2.0 * w * t) - std::exp(-2.0 * w * p.tau);
      return {lt * std::exp(2.0 * (p.a0 - p.c0) / w * de),
              lt * std::exp(5.0 * (p.c0 - p.a0) / (2.0 * w) * de)};
    }
    case BianchiClass::SL2R: {
      const double ratio =
          (p.c0 + 2.0 / 3.0 * t) / (p.c0 + 2.0 / 3.0 * p.tau);
      return {lt * std::exp(-2.0 * (t - p.tau)), lt * ratio * ratio * ratio};
    }
    case BianchiClass::Heisenberg:
      return {lt * detail::heis_lower_factor(p.a0, p.b0, t) /
                  detail::heis_lower_factor(p.a0, p.b0, p.tau),
              lt * detail::heis_upper_factor(p.a0, t) /
                  detail::heis_upper_factor(p.a0, p.tau)};
    case BianchiClass::E11:
      return {lt * std::pow(t / p.tau, -*p.c2),
              lt * std::exp(*p.c1 * (1.0 / p.tau - 1.0 / t))};
    case BianchiClass::E2: {
      const double w = p.b0 * p.b0;
      const double de = std::exp(-4.0 * w * t) - std::exp(-4.0 * w * p.tau);
      const double m = detail::e2_upper_rate_constant(p.a0, p.b0);
      return {lt * std::exp(p.a0 * p.a0 * (p.a0 - p.b0) / (2.0 * w) * de),
              lt * std::exp(-m / (4.0 * w) * de)};
    }
    default:
      throw ParameterError("no bounds for this class");
  }
}

/// First grid time from which the rate relaxations hold through the end
/// of the span, i.e. the closed-form bounds' own threshold time. Returns
/// the time, or throws NoTauError if the relaxations never settle.
inline double theorem_tau(const FlowTrajectory& traj,
                          const TheoremBoundParams& p, Convention convention,
                          double slack = 1e-10) {
  const auto& samples = traj.samples();
  std::ptrdiff_t first_ok = -1;
  for (std::ptrdiff_t i = std::ptrdiff_t(samples.size()) - 1; i >= 0; --i) {
    const double t = samples[std::size_t(i)].t;
    if (p.cls == BianchiClass::E11 && t <= 0.0) break;
    const auto rc = reaction_at(traj, t, convention);
    const auto [rlo, rhi] = theorem_rates(p, t);
    const bool ok = rc.c_lo >= rlo - slack && rc.c_hi <= rhi + slack;
    if (!ok) break;
    first_ok = i;
  }
  if (first_ok < 0)
    throw NoTauError("closed-form rate relaxations do not hold at the end of "
                     "the span");
  return samples[std::size_t(first_ok)].t;
}

// ---------------------------------------------------------------------------
// E(1,1) constant reconstruction.

struct E11Constants {
  double c1, c2;
};

/// Smallest grid-certifiable constants: the resulting -c2/t and c1/t^2
/// rate bounds hold at every sampled point of [tau, t_end] by
/// construction.
inline E11Constants e11_constants(const FlowTrajectory& traj, double tau) {
  if (traj.bianchi_class() != BianchiClass::E11)
    throw ClassError("e11_constants requires an E(1,1) trajectory");
  if (tau < traj.t_begin() - 1e-12 || tau > traj.t_end() + 1e-12)
    throw RangeError("tau lies outside the trajectory span");
  double c1 = 0.0, c2 = 0.0;
  bool any = false;
  auto visit = [&](const MetricState& s) {
    const double ab = s.a + s.b;
    const double neg = s.c * ab * ab - ab * ab / 3.0;
    const double pos = ab * ab / 3.0 + s.a * (s.a * s.a - s.b * s.b);
    c2 = std::max(c2, s.t * std::max(0.0, neg));
    c1 = std::max(c1, s.t * s.t * std::max(0.0, pos));
    any = true;
  };
  visit(traj.at(tau));
  for (const auto& s : traj.samples())
    if (s.t > tau + 1e-12) visit(s);
  if (!any) throw RangeError("empty grid for constant reconstruction");
  return {c1, c2};
}

// ---------------------------------------------------------------------------
// Synthetic eigenvalue trajectories.

struct ExtremalMin {};
struct ExtremalMax {};
struct ConstantFractions {
  std::array<double, 3> w{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
};
struct PiecewiseRandom {
  std::uint64_t seed = 0;
  double switch_spacing = 0.5;
};
using WeightPolicy =
    std::variant<ExtremalMin, ExtremalMax, ConstantFractions, PiecewiseRandom>;

struct LambdaSeries {
  double tau = 0.0;
  std::vector<double> times;
  std::vector<double> values;

  double at(double t) const { return std::exp(log_dense.eval(t)[component]); }

  // Extremal policies reuse the envelope's two-component integration and
  // pick out the relevant component; the other policies integrate a
  // duplicated pair and read component 0.
  DenseSolution<2> log_dense;
  int component = 0;
};

namespace detail {

// xorshift-based uniform in (0,1); fixed bit path keeps batches
// reproducible across standard libraries.
class SimplexSampler {
 public:
  explicit SimplexSampler(std::uint64_t seed) : state_(seed * 2685821657736338717ULL + 1ULL) {}

  std::array<double, 3> next() {
    std::array<double, 3> g;
    double sum = 0.0;
    for (double& gi : g) {
      gi = -std::log(uniform());
      sum += gi;
    }
    for (double& gi : g) gi /= sum;
    return g;
  }

 private:
  double uniform() {
    state_ ^= state_ << 13;
    state_ ^= state_ >> 7;
    state_ ^= state_ << 17;
    // (0,1]; never 0 so the log above stays finite.
    return (double(state_ >> 11) + 1.0) * 0x1.0p-53;
  }
  std::uint64_t state_;
};

}  // namespace detail

/// Integrate d(lambda)/dt = (2 sum_i q_i f_i(t) - (2/3) R) lambda for
/// the simplex fractions f dictated by the policy. The result always
/// lies inside the envelope for the same convention.
inline LambdaSeries synth_lambda(const FlowTrajectory& traj,
                                 const WeightPolicy& policy, double tau,
                                 double lambda_tau, Convention convention) {
  if (!(lambda_tau > 0.0)) throw DomainError("lambda_tau must be positive");
  const auto grid = envelope_grid(traj, tau);
  const OdeControls ode = detail::envelope_ode_controls(traj);

  auto coeff_for = [&](const std::array<double, 3>& f, double t) {
    const MetricState s = traj.at(t);
    const auto curv = ricci_components(traj.bianchi_class(), s);
    const auto q = reaction_terms(curv, convention);
    return 2.0 * (q[0] * f[0] + q[1] * f[1] + q[2] * f[2]) -
           2.0 / 3.0 * curv.scalar;
  };

  const double l0 = std::log(lambda_tau);
  DenseSolution<2> logs(tau, {l0, l0});
  int component = 0;
  auto ok = [](double, const Vec<2>&) { return true; };

  if (std::holds_alternative<ExtremalMin>(policy) ||
      std::holds_alternative<ExtremalMax>(policy)) {
    logs = detail::integrate_reaction_pair(traj, tau, lambda_tau, convention);
    component = std::holds_alternative<ExtremalMin>(policy) ? 0 : 1;
  } else if (const auto* cf = std::get_if<ConstantFractions>(&policy)) {
    double sum = 0.0;
    for (double wi : cf->w) {
      if (wi < 0.0) throw PolicyError("simplex fractions must be nonnegative");
      sum += wi;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw PolicyError("simplex fractions must sum to 1");
    auto rhs = [&](double t, const Vec<2>&) -> Vec<2> {
      const double c = coeff_for(cf->w, t);
      return {c, c};
    };
    if (traj.t_end() > tau)
      integrate_dopri5_into(logs, rhs, tau, Vec<2>{l0, l0}, traj.t_end(), ode,
                            ok);
  } else {
    const auto& pr = std::get<PiecewiseRandom>(policy);
    if (!(pr.switch_spacing > 0.0))
      throw PolicyError("switch spacing must be positive");
    detail::SimplexSampler sampler(pr.seed);
    double t = tau;
    Vec<2> y{l0, l0};
    while (t < traj.t_end() - 1e-12) {
      const double t_next = std::min(t + pr.switch_spacing, traj.t_end());
      const auto f = sampler.next();
      auto rhs = [&](double tt, const Vec<2>&) -> Vec<2> {
        const double c = coeff_for(f, tt);
        return {c, c};
      };
      integrate_dopri5_into(logs, rhs, t, y, t_next, ode, ok);
      y = logs.back_state();
      t = t_next;
    }
  }

  LambdaSeries series;
  series.tau = tau;
  series.log_dense = std::move(logs);
  series.component = component;
  series.times = grid;
  series.values.reserve(grid.size());
  for (double t : grid) series.values.push_back(series.at(t));
  return series;
}

enum class FactorKind { MinFactor, MaxFactor };

/// lambda(t) * exp(int_tau^t ((2/3) R - 2 q_min) ds) for MinFactor (the
/// nondecreasing quantity), or with q_max for MaxFactor (nonincreasing).
inline TimeSeries monotone_quantity(const FlowTrajectory& traj,
                                    const LambdaSeries& series, double tau,
                                    FactorKind which, Convention convention) {
  if (series.times.empty() || std::abs(series.tau - tau) > 1e-9)
    throw RangeError("lambda series is not anchored at tau");
  auto integrand = [&](double t) {
    const MetricState s = traj.at(t);
    const auto curv = ricci_components(traj.bianchi_class(), s);
    const auto q = reaction_terms(curv, convention);
    const double qext = which == FactorKind::MinFactor
                            ? std::min({q[0], q[1], q[2]})
                            : std::max({q[0], q[1], q[2]});
    return 2.0 / 3.0 * curv.scalar - 2.0 * qext;
  };
  const auto integral = cumulative_integral_checked(integrand, series.times);
  TimeSeries out;
  out.times = series.times;
  out.values.reserve(series.times.size());
  for (std::size_t i = 0; i < series.times.size(); ++i)
    out.values.push_back(series.values[i] * std::exp(integral[i]));
  return out;
}

}  // namespace ricciflow
