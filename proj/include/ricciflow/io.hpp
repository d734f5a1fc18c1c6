#pragma once

// Configuration loading, run orchestration, and bit-stable CSV / JSON
// serialization. Doubles are written with 17 significant digits so the
// files round-trip exactly.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ricciflow/analysis.hpp"
#include "ricciflow/eigen_bounds.hpp"
#include "ricciflow/flow.hpp"
#include "ricciflow/geometry.hpp"

namespace ricciflow {

using ordered_json = nlohmann::ordered_json;

struct RunConfig {
  std::string class_name = "su2";
  std::array<double, 3> initial{1.0, 1.0, 1.0};
  bool normalize = true;
  double t_end = 10.0;
  IntegratorControls controls{};
  std::string convention = "component";
  double lambda_tau = 1.0;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs{"csv", "json"};

  bool operator==(const RunConfig&) const = default;

  BianchiClass cls() const {
    const auto c = parse_class(class_name);
    if (!c)
      throw ConfigError("unknown class '" + class_name +
                        "'; accepted: " + accepted_class_names());
    return *c;
  }
  Convention conv() const {
    if (convention == "component") return Convention::ComponentLiteral;
    if (convention == "endomorphism") return Convention::Endomorphism;
    throw ConfigError("convention must be 'component' or 'endomorphism'");
  }
};

inline std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void validate_config(const RunConfig& cfg) {
  (void)cfg.cls();
  (void)cfg.conv();
  for (double v : cfg.initial)
    if (!(std::isfinite(v) && v > 0.0))
      throw ConfigError("initial coefficients must be finite and positive");
  if (!(std::isfinite(cfg.t_end) && cfg.t_end > 0.0))
    throw ConfigError("t_end must be finite and positive");
  auto in01 = [](double v) { return std::isfinite(v) && v > 0.0 && v < 1.0; };
  if (!in01(cfg.controls.rel_tol))
    throw ConfigError("controls.rel_tol must lie in (0,1)");
  if (!in01(cfg.controls.abs_tol))
    throw ConfigError("controls.abs_tol must lie in (0,1)");
  if (!(cfg.controls.max_step > 0.0))
    throw ConfigError("controls.max_step must be positive");
  if (!(cfg.controls.sample_spacing > 0.0))
    throw ConfigError("controls.sample_spacing must be positive");
  if (!(cfg.controls.drift_ceiling > 0.0))
    throw ConfigError("controls.drift_ceiling must be positive");
  if (!(std::isfinite(cfg.lambda_tau) && cfg.lambda_tau > 0.0))
    throw ConfigError("lambda_tau must be finite and positive");
  for (const auto& o : cfg.outputs)
    if (o != "csv" && o != "json")
      throw ConfigError("outputs entries must be 'csv' or 'json'");
}

inline ordered_json config_to_json(const RunConfig& cfg) {
  ordered_json j;
  j["class"] = cfg.class_name;
  j["initial"] = cfg.initial;
  j["normalize"] = cfg.normalize;
  j["t_end"] = cfg.t_end;
  j["controls"] = {{"rel_tol", cfg.controls.rel_tol},
                   {"abs_tol", cfg.controls.abs_tol},
                   {"max_step", cfg.controls.max_step},
                   {"sample_spacing", cfg.controls.sample_spacing},
                   {"drift_ceiling", cfg.controls.drift_ceiling}};
  j["convention"] = cfg.convention;
  j["lambda_tau"] = cfg.lambda_tau;
  j["seed"] = cfg.seed;
  j["outputs"] = cfg.outputs;
  return j;
}

inline RunConfig config_from_json(const ordered_json& j) {
  RunConfig cfg;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "class") cfg.class_name = value.get<std::string>();
      else if (key == "initial") cfg.initial = value.get<std::array<double, 3>>();
      else if (key == "normalize") cfg.normalize = value.get<bool>();
      else if (key == "t_end") cfg.t_end = value.get<double>();
      else if (key == "controls") {
        for (const auto& [ck, cv] : value.items()) {
          if (ck == "rel_tol") cfg.controls.rel_tol = cv.get<double>();
          else if (ck == "abs_tol") cfg.controls.abs_tol = cv.get<double>();
          else if (ck == "max_step") cfg.controls.max_step = cv.get<double>();
          else if (ck == "sample_spacing") cfg.controls.sample_spacing = cv.get<double>();
          else if (ck == "drift_ceiling") cfg.controls.drift_ceiling = cv.get<double>();
          else throw ConfigError("unknown key 'controls." + ck + "'");
        }
      } else if (key == "convention") cfg.convention = value.get<std::string>();
      else if (key == "lambda_tau") cfg.lambda_tau = value.get<double>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "outputs") cfg.outputs = value.get<std::vector<std::string>>();
      else throw ConfigError("unknown key '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("field '" + key + "': " + e.what());
    }
  }
  validate_config(cfg);
  if (cfg.normalize) {
    const double prod = cfg.initial[0] * cfg.initial[1] * cfg.initial[2];
    if (std::abs(prod - 1.0) > 1e-12) {
      const double scale = std::cbrt(prod);
      for (double& v : cfg.initial) v /= scale;
    }
  }
  return cfg;
}

inline RunConfig load_config(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // Translate the byte offset into line/column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') { ++line; col = 1; } else ++col;
    }
    throw ConfigError("parse error at line " + std::to_string(line) +
                      ", column " + std::to_string(col) + ": " + e.what());
  }
  return config_from_json(j);
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return load_config(in);
}

// ---------------------------------------------------------------------------
// CSV serialization.

/// Column bundle for the fixed-header CSV. A column is omitted entirely
/// when its vector is empty; individual cells are omitted when NaN.
struct CsvBundle {
  std::vector<double> t;
  std::vector<double> a, b, c;
  std::vector<double> r11, r22, r33, r;
  std::vector<double> c_lo, c_hi;
  std::vector<double> lower, upper, lambda_synth;
};

inline void write_csv(const CsvBundle& bundle, const std::filesystem::path& path) {
  const std::vector<const std::vector<double>*> cols = {
      &bundle.a,    &bundle.b,    &bundle.c,   &bundle.r11,
      &bundle.r22,  &bundle.r33,  &bundle.r,   &bundle.c_lo,
      &bundle.c_hi, &bundle.lower, &bundle.upper, &bundle.lambda_synth};
  for (const auto* col : cols)
    if (!col->empty() && col->size() != bundle.t.size())
      throw RangeError("csv columns are not aligned with the time grid");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "t,A,B,C,R11,R22,R33,R,c_lo,c_hi,L,U,lambda_synth\n";
  for (std::size_t i = 0; i < bundle.t.size(); ++i) {
    out << fmt17(bundle.t[i]);
    for (const auto* col : cols) {
      out << ',';
      if (!col->empty() && !std::isnan((*col)[i])) out << fmt17((*col)[i]);
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Run orchestration.

enum class Command { Simulate, Envelope, Verify, Report };

inline const char* command_name(Command c) {
  switch (c) {
    case Command::Simulate: return "simulate";
    case Command::Envelope: return "envelope";
    case Command::Verify:   return "verify";
    case Command::Report:   return "report";
  }
  return "?";
}

struct RunSummary {
  ordered_json json;
  bool pass = false;
};

inline ordered_json lemma_to_json(const LemmaReport& rep) {
  ordered_json j;
  j["lemma"] = lemma_name(rep.id);
  j["pass"] = rep.pass;
  j["clauses"] = ordered_json::array();
  for (const auto& cl : rep.clauses)
    j["clauses"].push_back({{"claim", cl.claim},
                            {"worst_slack", cl.worst_slack},
                            {"worst_time", cl.worst_time},
                            {"pass", cl.pass}});
  return j;
}

inline std::optional<LemmaId> lemma_for_class(BianchiClass cls) {
  switch (cls) {
    case BianchiClass::SU2:  return LemmaId::L4_1;
    case BianchiClass::SL2R: return LemmaId::L5_1;
    case BianchiClass::E11:  return LemmaId::L7_1;
    case BianchiClass::E2:   return LemmaId::L8_1;
    default: return std::nullopt;
  }
}

inline RunSummary run(const RunConfig& cfg, Command cmd,
                      const std::filesystem::path& out_dir) {
  validate_config(cfg);
  const BianchiClass cls = cfg.cls();
  const Convention conv = cfg.conv();
  std::filesystem::create_directories(out_dir);

  const MetricState initial{0.0, cfg.initial[0], cfg.initial[1], cfg.initial[2]};
  const bool normalized = std::abs(initial.volume() - 1.0) <= 1e-9;
  FlowTrajectory traj =
      integrate(cls, initial, cfg.t_end, cfg.controls, !normalized);

  RunSummary result;
  ordered_json& j = result.json;
  j["config"] = config_to_json(cfg);
  j["command"] = command_name(cmd);
  j["volume_drift"] = traj.volume_drift();
  j["worst_drift_time"] = traj.worst_drift_time();
  bool pass = true;

  const bool want_envelope = cmd == Command::Envelope || cmd == Command::Report;
  const bool want_verify = cmd == Command::Verify || cmd == Command::Report;

  double tau = traj.t_begin();
  if (cls != BianchiClass::Euclidean3 && (want_envelope || want_verify)) {
    const TauCertificate cert = detect_tau(cls, traj, conv);
    tau = cert.tau;
    ordered_json cj;
    cj["tau"] = cert.tau;
    cj["holds_to_end"] = cert.holds_to_end;
    cj["predicates"] = ordered_json::array();
    for (const auto& p : cert.predicates)
      cj["predicates"].push_back({{"name", p.name},
                                  {"first_satisfied", p.first_satisfied},
                                  {"min_margin", p.min_margin}});
    j["tau_certificate"] = cj;
    pass = pass && cert.holds_to_end;
  }
  j["tau"] = tau;

  CsvBundle bundle;
  bundle.t = traj.sample_times();
  for (const auto& s : traj.samples()) {
    bundle.a.push_back(s.a);
    bundle.b.push_back(s.b);
    bundle.c.push_back(s.c);
    const auto curv = ricci_components(cls, s);
    bundle.r11.push_back(curv.r11);
    bundle.r22.push_back(curv.r22);
    bundle.r33.push_back(curv.r33);
    bundle.r.push_back(curv.scalar);
  }

  if (want_envelope) {
    const EigenEnvelope env = envelope_integrate(traj, tau, cfg.lambda_tau, conv);
    const LambdaSeries synth = synth_lambda(
        traj, PiecewiseRandom{cfg.seed, 0.5}, tau, cfg.lambda_tau, conv);
    const double nan = std::nan("");
    for (const auto& s : traj.samples()) {
      const auto rc = reaction_coefficients(s, ricci_components(cls, s), conv);
      bundle.c_lo.push_back(rc.c_lo);
      bundle.c_hi.push_back(rc.c_hi);
      if (s.t >= tau - 1e-12) {
        bundle.lower.push_back(env.lower_at(s.t));
        bundle.upper.push_back(env.upper_at(s.t));
        bundle.lambda_synth.push_back(synth.at(s.t));
      } else {
        bundle.lower.push_back(nan);
        bundle.upper.push_back(nan);
        bundle.lambda_synth.push_back(nan);
      }
    }
    bool contained = true;
    for (std::size_t i = 0; i < env.times.size(); ++i) {
      const double eps = 1e-8 * env.upper[i];
      const double v = synth.at(env.times[i]);
      contained = contained && v >= env.lower[i] - eps && v <= env.upper[i] + eps;
    }
    j["envelope"] = {{"tau", tau},
                     {"lambda_tau", cfg.lambda_tau},
                     {"L_end", env.lower.back()},
                     {"U_end", env.upper.back()},
                     {"synth_end", synth.values.back()},
                     {"synth_contained", contained}};
    pass = pass && contained;

    if (cls != BianchiClass::Euclidean3) {
      TheoremBoundParams params;
      params.cls = cls;
      params.lambda_tau = cfg.lambda_tau;
      params.a0 = traj.initial().a;
      params.b0 = traj.initial().b;
      params.c0 = traj.initial().c;
      params.tau = tau;
      if (cls == BianchiClass::E11) {
        if (params.tau <= 0.0)
          params.tau = std::min(1.0, 0.5 * (traj.t_begin() + traj.t_end()));
        const auto cc = e11_constants(traj, params.tau);
        params.c1 = cc.c1;
        params.c2 = cc.c2;
      }
      const BoundPair bp = theorem_bounds(params, traj.t_end());
      ordered_json tb = {{"tau_used", params.tau},
                         {"lo", bp.lo},
                         {"hi", bp.hi}};
      if (params.c1) tb["c1"] = *params.c1;
      if (params.c2) tb["c2"] = *params.c2;
      j["theorem_bounds_at_t_end"] = tb;
    }
  }

  if (want_verify) {
    j["lemma_reports"] = ordered_json::array();
    if (const auto lemma = lemma_for_class(cls)) {
      const LemmaReport rep = verify_lemma(*lemma, traj);
      j["lemma_reports"].push_back(lemma_to_json(rep));
      pass = pass && rep.pass;
    }
  }

  result.pass = pass;
  j["pass"] = pass;

  for (const auto& fmt : cfg.outputs) {
    if (fmt == "csv") write_csv(bundle, out_dir / "trajectory.csv");
    if (fmt == "json") {
      std::ofstream out(out_dir / "summary.json", std::ios::binary);
      if (!out) throw Error("cannot write summary.json");
      out << j.dump(2) << '\n';
    }
  }
  return result;
}

}  // namespace ricciflow
