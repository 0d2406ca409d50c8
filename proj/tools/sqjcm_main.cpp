// Command-line front end: coefficient tables, collapse/revival curves, direct
// integration, the validation suite, and parameter sweeps.

#include <CLI11.hpp>

#include <iostream>

#include "sqjcm/runners.hpp"

using namespace sqjcm::cli;

namespace {

struct CommonFlags {
  std::string config_path;
  FlagOverrides flags;
  std::string inject_defect;  // validation harness hook

  void attach(CLI::App* app, bool with_times = true) {
    app->add_option("--config", config_path, "JSON run configuration file");
    auto opt = [&](const char* name, auto& slot, const char* help) {
      app->add_option_function<std::decay_t<decltype(*slot)>>(
          name, [&slot](const auto& v) { slot = v; }, help);
    };
    opt("--a", flags.a, "displacement magnitude of the transformed mode");
    opt("--theta", flags.theta, "displacement phase");
    opt("--r", flags.r, "squeeze magnitude");
    opt("--phi", flags.phi, "squeeze phase");
    opt("--b", flags.b, "initial coherent amplitude");
    opt("--chi", flags.chi, "initial coherent phase");
    opt("--lambda", flags.lambda, "atom-field coupling");
    opt("--delta", flags.delta, "detuning");
    opt("--tail-target", flags.tail_target, "coefficient mass target");
    opt("--retained", flags.retained, "retained Fock dimension");
    opt("--buffer", flags.buffer, "exponential buffer dimension");
    opt("--jobs", flags.jobs, "parallel sweep workers");
    opt("--out", flags.out, "output directory");
    if (with_times) {
      opt("--t-max", flags.t_max, "time horizon in lambda*t");
      opt("--t-steps", flags.t_steps, "number of grid points");
    }
    app->add_flag_function("--svg", [this](std::int64_t) { flags.svg = true; },
                           "emit SVG plots next to the CSV files");
  }
};

int dispatch(Command cmd, const CommonFlags& common) {
  try {
    RunConfig cfg = parse_config(cmd, common.config_path, common.flags);
    sqjcm::validation::Defects defects;
    if (common.inject_defect == "flip_sinh_sign") defects.flip_sinh_sign = true;
    else if (common.inject_defect == "drop_chi_phase") defects.drop_chi_phase = true;
    else if (!common.inject_defect.empty()) {
      std::cerr << "config error: unknown defect '" << common.inject_defect << "'\n";
      return kExitConfig;
    }
    return run_command(cfg, defects);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation toolkit for the two-level atom exchanging squeezed coherent photons"};
  app.require_subcommand(1);

  CommonFlags c_bn, c_rev, c_evo, c_val, c_sweep;

  auto* bn = app.add_subcommand("bn", "expansion coefficients of the initial field");
  c_bn.attach(bn, false);

  auto* rev = app.add_subcommand("revival", "collapse/revival curve from the exact solution");
  c_rev.attach(rev);
  rev->add_flag_function("--jcm", [&](std::int64_t) { c_rev.flags.jcm = true; },
                         "also emit the coherent-baseline curve");

  auto* evo = app.add_subcommand("evolve", "direct Schrodinger integration");
  c_evo.attach(evo);

  auto* val = app.add_subcommand("validate", "run the cross-route validation suite");
  c_val.attach(val, false);
  val->add_flag_function("--quick", [&](std::int64_t) { c_val.flags.quick = true; },
                         "no-squeeze subset, runs in seconds");
  val->add_option("--inject-defect", c_val.inject_defect,
                  "testing aid: corrupt a construction (flip_sinh_sign | drop_chi_phase)");

  auto* sweep = app.add_subcommand("sweep", "cartesian parameter sweep");
  c_sweep.attach(sweep);

  CLI11_PARSE(app, argc, argv);

  if (bn->parsed()) return dispatch(Command::bn, c_bn);
  if (rev->parsed()) return dispatch(Command::revival, c_rev);
  if (evo->parsed()) return dispatch(Command::evolve, c_evo);
  if (val->parsed()) return dispatch(Command::validate, c_val);
  if (sweep->parsed()) return dispatch(Command::sweep, c_sweep);
  return kExitConfig;
}
