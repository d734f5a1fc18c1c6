// Command-line front end: simulate / envelope / verify / report.
//
// Exit codes: 0 full pass, 1 verification failure, 2 usage or config
// error, 3 integration failure.

#include <array>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ricciflow/io.hpp"

namespace {

struct FlagOverrides {
  std::string config_path;
  std::string out_dir = "out";
  std::string class_name;
  std::vector<double> initial;
  int normalize = -1;  // -1 unset, 0 false, 1 true
  double t_end = -1.0;
  double rel_tol = -1.0, abs_tol = -1.0, max_step = -1.0, sample_spacing = -1.0;
  std::string convention;
  double lambda_tau = -1.0;
  std::int64_t seed = -1;
  std::vector<std::string> outputs;
};

void add_common_options(CLI::App* sub, FlagOverrides& f) {
  sub->add_option("--config", f.config_path, "JSON config file");
  sub->add_option("--out-dir", f.out_dir, "output directory");
  sub->add_option("--class", f.class_name,
                  "Bianchi class (" + ricciflow::accepted_class_names() + ")");
  sub->add_option("--initial", f.initial, "initial coefficients A0 B0 C0")
      ->expected(3);
  sub->add_flag("--normalize,!--no-normalize",
                [&f](std::int64_t count) { f.normalize = count > 0 ? 1 : 0; },
                "rescale the initial state to unit volume");
  sub->add_option("--t-end", f.t_end, "integration horizon");
  sub->add_option("--rel-tol", f.rel_tol, "relative tolerance");
  sub->add_option("--abs-tol", f.abs_tol, "absolute tolerance");
  sub->add_option("--max-step", f.max_step, "maximum step size");
  sub->add_option("--sample-spacing", f.sample_spacing, "output grid spacing");
  sub->add_option("--convention", f.convention, "component | endomorphism");
  sub->add_option("--lambda-tau", f.lambda_tau, "eigenvalue anchor value");
  sub->add_option("--seed", f.seed, "seed for the synthetic trajectory");
  sub->add_option("--outputs", f.outputs, "output formats (csv json)");
}

ricciflow::RunConfig build_config(const FlagOverrides& f) {
  ricciflow::RunConfig cfg;
  if (!f.config_path.empty()) cfg = ricciflow::load_config(f.config_path);
  if (!f.class_name.empty()) cfg.class_name = f.class_name;
  if (!f.initial.empty())
    cfg.initial = {f.initial[0], f.initial[1], f.initial[2]};
  if (f.normalize >= 0) cfg.normalize = f.normalize == 1;
  if (f.t_end > 0.0) cfg.t_end = f.t_end;
  if (f.rel_tol > 0.0) cfg.controls.rel_tol = f.rel_tol;
  if (f.abs_tol > 0.0) cfg.controls.abs_tol = f.abs_tol;
  if (f.max_step > 0.0) cfg.controls.max_step = f.max_step;
  if (f.sample_spacing > 0.0) cfg.controls.sample_spacing = f.sample_spacing;
  if (!f.convention.empty()) cfg.convention = f.convention;
  if (f.lambda_tau > 0.0) cfg.lambda_tau = f.lambda_tau;
  if (f.seed >= 0) cfg.seed = static_cast<std::uint64_t>(f.seed);
  if (!f.outputs.empty()) cfg.outputs = f.outputs;
  ricciflow::validate_config(cfg);
  if (cfg.normalize) {
    const double prod = cfg.initial[0] * cfg.initial[1] * cfg.initial[2];
    if (std::abs(prod - 1.0) > 1e-12) {
      const double scale = std::cbrt(prod);
      for (double& v : cfg.initial) v /= scale;
    }
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Normalized Ricci flow laboratory for the Bianchi classes"};
  app.require_subcommand(1);

  FlagOverrides flags;
  ricciflow::Command cmd = ricciflow::Command::Simulate;
  for (auto [name, value] :
       {std::pair{"simulate", ricciflow::Command::Simulate},
        std::pair{"envelope", ricciflow::Command::Envelope},
        std::pair{"verify", ricciflow::Command::Verify},
        std::pair{"report", ricciflow::Command::Report}}) {
    auto* sub = app.add_subcommand(name, std::string("run '") + name + "'");
    add_common_options(sub, flags);
    sub->callback([&cmd, value = value]() { cmd = value; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    const ricciflow::RunConfig cfg = build_config(flags);
    const ricciflow::RunSummary summary =
        ricciflow::run(cfg, cmd, flags.out_dir);
    std::cout << summary.json.dump(2) << '\n';
    return summary.pass ? 0 : 1;
  } catch (const ricciflow::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ricciflow::IntegrationError& e) {
    std::cerr << "integration error: " << e.what()
              << " (last good time " << e.last_good_time << ")\n";
    return 3;
  } catch (const ricciflow::ConservationError& e) {
    std::cerr << "conservation error: " << e.what() << " (drift " << e.drift
              << " at t=" << e.worst_time << ")\n";
    return 3;
  } catch (const ricciflow::NoTauError& e) {
    ricciflow::ordered_json j;
    j["error"] = "no_tau";
    j["message"] = e.what();
    j["pass"] = false;
    std::cout << j.dump(2) << '\n';
    std::error_code ec;
    std::filesystem::create_directories(flags.out_dir, ec);
    if (!ec) {
      std::ofstream out(std::filesystem::path(flags.out_dir) / "summary.json",
                        std::ios::binary);
      if (out) out << j.dump(2) << '\n';
    }
    std::cerr << "verification failure: " << e.what() << '\n';
    return 1;
  } catch (const ricciflow::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
