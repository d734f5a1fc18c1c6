#pragma once

// Bianchi-class homogeneous 3-geometries in a Milnor frame: structure
// constants, diagonal Ricci tensor, scalar curvature and the right-hand
// side of the volume-normalized Ricci flow ODE system.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "ricciflow/common.hpp"

namespace ricciflow {

enum class BianchiClass { Euclidean3, SU2, SL2R, Heisenberg, E11, E2 };

inline constexpr std::array<BianchiClass, 6> kAllClasses = {
    BianchiClass::Euclidean3, BianchiClass::SU2,  BianchiClass::SL2R,
    BianchiClass::Heisenberg, BianchiClass::E11,  BianchiClass::E2};

inline constexpr std::array<BianchiClass, 5> kNontrivialClasses = {
    BianchiClass::SU2, BianchiClass::SL2R, BianchiClass::Heisenberg,
    BianchiClass::E11, BianchiClass::E2};

/// Signed structure constants (e1,e2,e3) of the Milnor frame:
/// [X2,X3]=e1*X1, [X3,X1]=e2*X2, [X1,X2]=e3*X3.
struct StructureConstants {
  int e1, e2, e3;
};

inline StructureConstants structure_constants(BianchiClass cls) {
  switch (cls) {
    case BianchiClass::Euclidean3: return {0, 0, 0};
    case BianchiClass::SU2:        return {+1, +1, +1};
    case BianchiClass::SL2R:       return {-1, +1, +1};
    case BianchiClass::Heisenberg: return {+1, 0, 0};
    case BianchiClass::E11:        return {-1, +1, 0};
    case BianchiClass::E2:         return {+1, +1, 0};
  }
  throw ClassError("unknown Bianchi class");
}

inline const char* class_name(BianchiClass cls) {
  switch (cls) {
    case BianchiClass::Euclidean3: return "euclidean3";
    case BianchiClass::SU2:        return "su2";
    case BianchiClass::SL2R:       return "sl2r";
    case BianchiClass::Heisenberg: return "heisenberg";
    case BianchiClass::E11:        return "e11";
    case BianchiClass::E2:         return "e2";
  }
  throw ClassError("unknown Bianchi class");
}

inline std::optional<BianchiClass> parse_class(std::string_view name) {
  for (BianchiClass cls : kAllClasses)
    if (name == class_name(cls)) return cls;
  if (name == "r3") return BianchiClass::Euclidean3;
  return std::nullopt;
}

inline std::string accepted_class_names() {
  std::string out;
  for (BianchiClass cls : kAllClasses) {
    if (!out.empty()) out += ", ";
    out += class_name(cls);
  }
  return out;
}

/// Diagonal metric g = a*(theta^1)^2 + b*(theta^2)^2 + c*(theta^3)^2
/// at flow time t. Coefficients must stay strictly positive.
struct MetricState {
  double t = 0.0;
  double a = 1.0, b = 1.0, c = 1.0;

  double volume() const { return a * b * c; }
};

/// Diagonal lower-index Ricci components plus the Ricci endomorphism
/// eigenvalues rho_i = r_ii / g_ii and the scalar curvature.
struct CurvatureData {
  double r11, r22, r33;
  double scalar;
  double rho1, rho2, rho3;

  std::array<double, 3> components() const { return {r11, r22, r33}; }
  std::array<double, 3> endomorphism() const { return {rho1, rho2, rho3}; }
};

inline void require_positive(const MetricState& s) {
  if (!(s.a > 0.0)) throw DomainError("metric coefficient a must be positive");
  if (!(s.b > 0.0)) throw DomainError("metric coefficient b must be positive");
  if (!(s.c > 0.0)) throw DomainError("metric coefficient c must be positive");
}

inline CurvatureData ricci_components(BianchiClass cls, const MetricState& s) {
  require_positive(s);
  const double a = s.a, b = s.b, c = s.c;
  CurvatureData out{};
  switch (cls) {
    case BianchiClass::Euclidean3:
      out.r11 = out.r22 = out.r33 = out.scalar = 0.0;
      break;
    case BianchiClass::SU2:
      out.r11 = 0.5 * a * (a * a - (b - c) * (b - c));
      out.r22 = 0.5 * b * (b * b - (a - c) * (a - c));
      out.r33 = 0.5 * c * (c * c - (a - b) * (a - b));
      out.scalar = 0.5 * (a * a - (b - c) * (b - c)) +
                   0.5 * (b * b - (a - c) * (a - c)) +
                   0.5 * (c * c - (a - b) * (a - b));
      break;
    case BianchiClass::SL2R:
      out.r11 = 0.5 * a * (a * a - (b - c) * (b - c));
      out.r22 = 0.5 * b * (b * b - (a + c) * (a + c));
      out.r33 = 0.5 * c * (c * c - (a + b) * (a + b));
      out.scalar = 0.5 * (a * a - (b - c) * (b - c)) +
                   0.5 * (b * b - (a + c) * (a + c)) +
                   0.5 * (c * c - (a + b) * (a + b));
      break;
    case BianchiClass::Heisenberg:
      out.r11 = 0.5 * a * a * a;
      out.r22 = -0.5 * a * a * b;
      out.r33 = -0.5 * a * a * c;
      out.scalar = -0.5 * a * a;
      break;
    case BianchiClass::E11:
      out.r11 = 0.5 * a * (a * a - b * b);
      out.r22 = 0.5 * b * (b * b - a * a);
      out.r33 = -0.5 * c * (a + b) * (a + b);
      out.scalar = -0.5 * (a + b) * (a + b);
      break;
    case BianchiClass::E2:
      out.r11 = 0.5 * a * (a * a - b * b);
      out.r22 = 0.5 * b * (b * b - a * a);
      out.r33 = -0.5 * c * (a - b) * (a - b);
      out.scalar = -0.5 * (a - b) * (a - b);
      break;
  }
  out.rho1 = out.r11 / a;
  out.rho2 = out.r22 / b;
  out.rho3 = out.r33 / c;
  return out;
}

/// Right-hand side (da/dt, db/dt, dc/dt) of the normalized Ricci flow.
/// Agrees with -2*Ric + (2/3)*R*g componentwise.
inline std::array<double, 3> flow_rhs(BianchiClass cls, const MetricState& s) {
  require_positive(s);
  const double a = s.a, b = s.b, c = s.c;
  const double k = 2.0 / 3.0;
  switch (cls) {
    case BianchiClass::Euclidean3:
      return {0.0, 0.0, 0.0};
    case BianchiClass::SU2:
      return {k * a * (-a * (2 * a - b - c) + (b - c) * (b - c)),
              k * b * (-b * (2 * b - a - c) + (a - c) * (a - c)),
              k * c * (-c * (2 * c - a - b) + (a - b) * (a - b))};
    case BianchiClass::SL2R:
      return {k * (-a * a * (2 * a + b + c) + a * (b - c) * (b - c)),
              k * (-b * b * (2 * b + a - c) + b * (a + c) * (a + c)),
              k * (-c * c * (2 * c + a - b) + c * (a + b) * (a + b))};
    case BianchiClass::Heisenberg:
      return {-4.0 / 3.0 * a * a * a, k * a * a * b, k * a * a * c};
    case BianchiClass::E11:
      return {k * (-2 * a * a * a - a * b * (a - b)),
              k * (-2 * b * b * b + a * b * (a - b)),
              k * c * (a + b) * (a + b)};
    case BianchiClass::E2:
      return {-k * a * (2 * a + b) * (a - b),
              k * b * (2 * b + a) * (a - b),
              k * c * (a - b) * (a - b)};
  }
  throw ClassError("unknown Bianchi class");
}

/// Rescale a state so that a*b*c = 1.
inline MetricState normalized(const MetricState& s) {
  require_positive(s);
  const double scale = std::cbrt(s.volume());
  return {s.t, s.a / scale, s.b / scale, s.c / scale};
}

}  // namespace ricciflow
