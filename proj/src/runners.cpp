#include "sqjcm/runners.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "sqjcm/dynamics.hpp"
#include "sqjcm/output.hpp"
#include "sqjcm/states.hpp"

namespace sqjcm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string effective_config_json(const RunConfig& cfg) {
  json j;
  j["command"] = to_string(cfg.command);
  j["params"] = {{"a", cfg.params.a},         {"theta", cfg.params.theta},
                 {"r", cfg.params.r},         {"phi", cfg.params.phi},
                 {"b", cfg.params.b},         {"chi", cfg.params.chi},
                 {"lambda", cfg.params.lambda}, {"delta", cfg.params.delta}};
  j["t_max"] = cfg.t_max;
  j["t_steps"] = cfg.t_steps;
  j["tail_target"] = cfg.tail_target;
  j["truncation"] = {{"retained", cfg.truncation.retained}, {"buffer", cfg.truncation.buffer}};
  j["output_dir"] = cfg.output_dir;
  j["emit_svg"] = cfg.emit_svg;
  if (cfg.command == Command::revival) j["jcm_compare"] = cfg.jcm_compare;
  if (cfg.command == Command::validate) j["quick"] = cfg.quick;
  if (cfg.command == Command::sweep) {
    j["point_command"] = cfg.point_command;
    j["jobs"] = cfg.jobs;
    auto axes = json::array();
    for (const auto& ax : cfg.sweep_axes) axes.push_back({{"field", ax.field}, {"values", ax.values}});
    j["sweep_axes"] = axes;
  }
  return j.dump();
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

std::vector<double> time_grid(const RunConfig& cfg) {
  std::vector<double> g(cfg.t_steps);
  for (int i = 0; i < cfg.t_steps; ++i)
    g[i] = cfg.t_max * static_cast<double>(i) / (cfg.t_steps - 1);
  return g;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir);
}

}  // namespace

int run_bn(const RunConfig& cfg) {
  Timer timer;
  ensure_dir(cfg.output_dir);
  Manifest man;
  man.command = "bn";
  man.config_json = effective_config_json(cfg);
  try {
    auto series = states::build_series(cfg.params, cfg.tail_target);
    std::vector<double> n(series.n_max + 1), re(series.n_max + 1), im(series.n_max + 1),
        abs2(series.n_max + 1);
    for (int k = 0; k <= series.n_max; ++k) {
      n[k] = k;
      re[k] = series.coefficients[k].real();
      im[k] = series.coefficients[k].imag();
      abs2[k] = std::norm(series.coefficients[k]);
    }
    write_csv(fs::path(cfg.output_dir) / "bn.csv",
              {{"n", &n}, {"re_bn", &re}, {"im_bn", &im}, {"abs2_bn", &abs2}});
    man.add_file(cfg.output_dir, "bn.csv");
    man.diagnostics.emplace_back("sum_abs2", format_g17(series.mass()));
    man.diagnostics.emplace_back("tail_mass", format_g17(series.tail_mass));
    man.diagnostics.emplace_back("n_max", std::to_string(series.n_max));
    man.wall_seconds = timer.seconds();
    man.write(cfg.output_dir);
    return kExitOk;
  } catch (const states::SeriesError& e) {
    man.status = "convergence_failure";
    man.diagnostics.emplace_back("error", e.what());
    man.diagnostics.emplace_back("terms_used", std::to_string(e.terms_used));
    man.diagnostics.emplace_back("tail_estimate", format_g17(e.tail_estimate));
    if (e.achieved_mass >= 0.0)
      man.diagnostics.emplace_back("achieved_mass", format_g17(e.achieved_mass));
    man.wall_seconds = timer.seconds();
    man.write(cfg.output_dir);
    std::cerr << "bn: " << e.what() << "\n";
    return kExitConvergence;
  }
}

int run_revival(const RunConfig& cfg) {
  Timer timer;
  ensure_dir(cfg.output_dir);
  Manifest man;
  man.command = "revival";
  man.config_json = effective_config_json(cfg);
  try {
    auto grid = time_grid(cfg);
    auto series = states::build_series(cfg.params, cfg.tail_target);
    auto curve = (cfg.params.delta == 0.0)
                     ? dynamics::ground_prob(series, cfg.params.lambda, grid)
                     : dynamics::ground_prob_detuned(series, cfg.params.lambda,
                                                     cfg.params.delta, grid);
    write_csv(fs::path(cfg.output_dir) / "p_scoh.csv",
              {{"lambda_t", &curve.times}, {"p_ground", &curve.values}});
    man.add_file(cfg.output_dir, "p_scoh.csv");
    if (cfg.emit_svg) {
      write_svg_curve(fs::path(cfg.output_dir) / "p_scoh.svg", curve.times, curve.values,
                      "ground-state probability (squeezed coherent exchange)");
      man.add_file(cfg.output_dir, "p_scoh.svg");
    }
    man.diagnostics.emplace_back("sum_abs2", format_g17(series.mass()));
    man.diagnostics.emplace_back("tail_mass", format_g17(series.tail_mass));
    if (cfg.jcm_compare) {
      auto jcm = dynamics::ground_prob_jcm(cfg.params.b, cfg.params.lambda, grid);
      write_csv(fs::path(cfg.output_dir) / "p_coh.csv",
                {{"lambda_t", &jcm.times}, {"p_ground", &jcm.values}});
      man.add_file(cfg.output_dir, "p_coh.csv");
      if (cfg.emit_svg) {
        write_svg_curve(fs::path(cfg.output_dir) / "p_coh.svg", jcm.times, jcm.values,
                        "ground-state probability (coherent baseline)");
        man.add_file(cfg.output_dir, "p_coh.svg");
      }
    }
    man.wall_seconds = timer.seconds();
    man.write(cfg.output_dir);
    return kExitOk;
  } catch (const states::SeriesError& e) {
    man.status = "convergence_failure";
    man.diagnostics.emplace_back("error", e.what());
    man.wall_seconds = timer.seconds();
    man.write(cfg.output_dir);
    std::cerr << "revival: " << e.what() << "\n";
    return kExitConvergence;
  }
}

int run_evolve(const RunConfig& cfg) {
  Timer timer;
  ensure_dir(cfg.output_dir);
  Manifest man;
  man.command = "evolve";
  man.config_json = effective_config_json(cfg);
  try {
    auto grid = time_grid(cfg);
    auto curve = dynamics::evolve(cfg.params, cfg.truncation, grid);
    write_csv(fs::path(cfg.output_dir) / "p_evolve.csv",
              {{"lambda_t", &curve.times}, {"p_ground", &curve.values}});
    man.add_file(cfg.output_dir, "p_evolve.csv");
    if (cfg.emit_svg) {
      write_svg_curve(fs::path(cfg.output_dir) / "p_evolve.svg", curve.times, curve.values,
                      "ground-state probability (direct integration)");
      man.add_file(cfg.output_dir, "p_evolve.svg");
    }
    man.diagnostics.emplace_back("norm_drift", format_g17(curve.norm_drift));
    man.diagnostics.emplace_back("edge_population", format_g17(curve.edge_population));
    man.diagnostics.emplace_back("retained_used", std::to_string(curve.retained_used));
    man.diagnostics.emplace_back("escalations", std::to_string(curve.escalations));
    man.wall_seconds = timer.seconds();
    man.write(cfg.output_dir);
    return kExitOk;
  } catch (const fock::TruncationError& e) {
    man.status = "truncation_breach";
    man.diagnostics.emplace_back("error", e.what());
    man.wall_seconds = timer.seconds();
    man.write(cfg.output_dir);
    std::cerr << "evolve: " << e.what() << "\n";
    return kExitTruncation;
  } catch (const states::SeriesError& e) {
    man.status = "convergence_failure";
    man.diagnostics.emplace_back("error", e.what());
    man.wall_seconds = timer.seconds();
    man.write(cfg.output_dir);
    std::cerr << "evolve: " << e.what() << "\n";
    return kExitConvergence;
  }
}

int run_validate(const RunConfig& cfg, const validation::Defects& defects) {
  Timer timer;
  ensure_dir(cfg.output_dir);
  validation::Options opt;
  opt.quick = cfg.quick;
  opt.defects = defects;
  auto report = validation::run_validation(opt);

  json j = json::object();
  for (const auto& c : report.checks) {
    j[c.name] = {{"pass", c.pass},
                 {"residual", c.residual},
                 {"tolerance", c.tolerance},
                 {"seconds", c.seconds}};
    if (!c.note.empty()) j[c.name]["note"] = c.note;
    std::printf("[%s] %-38s residual %-12.4g tol %-10.4g %s\n", c.pass ? "PASS" : "FAIL",
                c.name.c_str(), c.residual, c.tolerance, c.note.c_str());
  }
  {
    std::ofstream f(fs::path(cfg.output_dir) / "validate_report.json", std::ios::binary);
    f << j.dump(2) << "\n";
  }
  Manifest man;
  man.command = "validate";
  man.config_json = effective_config_json(cfg);
  man.add_file(cfg.output_dir, "validate_report.json");
  man.status = report.all_pass() ? "ok" : "validation_failure";
  man.wall_seconds = timer.seconds();
  man.write(cfg.output_dir);
  std::printf("%zu checks, %s\n", report.checks.size(),
              report.all_pass() ? "all passed" : "FAILURES PRESENT");
  return report.all_pass() ? kExitOk : kExitValidation;
}

namespace {

std::string point_dir_name(const std::vector<SweepAxis>& axes,
                           const std::vector<std::size_t>& idx) {
  std::string name;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (i) name += '_';
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s=%.6g", axes[i].field.c_str(), axes[i].values[idx[i]]);
    name += buf;
  }
  return name;
}

void apply_axis(ModelParams& p, const std::string& field, double v) {
  if (field == "a") p.a = v;
  else if (field == "theta") p.theta = v;
  else if (field == "r") p.r = v;
  else if (field == "phi") p.phi = v;
  else if (field == "b") p.b = v;
  else if (field == "chi") p.chi = v;
  else if (field == "lambda") p.lambda = v;
  else if (field == "delta") p.delta = v;
}

}  // namespace

int run_sweep(const RunConfig& cfg) {
  Timer timer;
  ensure_dir(cfg.output_dir);
  const auto& axes = cfg.sweep_axes;
  std::size_t total = 1;
  for (const auto& ax : axes) total *= ax.values.size();

  struct Point {
    std::string dir;
    RunConfig cfg;
    int exit_code = -1;
  };
  std::vector<Point> points;
  points.reserve(total);
  std::vector<std::size_t> idx(axes.size(), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    Point pt;
    pt.cfg = cfg;
    pt.cfg.command = command_from_string(cfg.point_command);
    pt.cfg.sweep_axes.clear();
    for (std::size_t i = 0; i < axes.size(); ++i)
      apply_axis(pt.cfg.params, axes[i].field, axes[i].values[idx[i]]);
    pt.dir = point_dir_name(axes, idx);
    pt.cfg.output_dir = (fs::path(cfg.output_dir) / pt.dir).string();
    points.push_back(std::move(pt));
    for (std::size_t i = axes.size(); i-- > 0;) {
      if (++idx[i] < axes[i].values.size()) break;
      idx[i] = 0;
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t k = next.fetch_add(1);
      if (k >= points.size()) return;
      Point& pt = points[k];
      try {
        pt.cfg.check();
        switch (pt.cfg.command) {
          case Command::bn: pt.exit_code = run_bn(pt.cfg); break;
          case Command::revival: pt.exit_code = run_revival(pt.cfg); break;
          case Command::evolve: pt.exit_code = run_evolve(pt.cfg); break;
          default: pt.exit_code = kExitConfig;
        }
      } catch (const std::exception& e) {
        std::cerr << "sweep point " << pt.dir << ": " << e.what() << "\n";
        pt.exit_code = kExitError;
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(points.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  Manifest man;
  man.command = "sweep";
  man.config_json = effective_config_json(cfg);
  int failures = 0;
  for (const auto& pt : points) {
    if (pt.exit_code != kExitOk) ++failures;
    man.diagnostics.emplace_back(pt.dir, pt.exit_code == kExitOk ? "ok" : ("exit " + std::to_string(pt.exit_code)));
    if (fs::exists(fs::path(pt.cfg.output_dir) / "manifest.json"))
      man.add_file(cfg.output_dir, (fs::path(pt.dir) / "manifest.json").string());
  }
  man.status = failures == 0 ? "ok" : std::to_string(failures) + " points failed";
  man.wall_seconds = timer.seconds();
  man.write(cfg.output_dir);
  std::printf("sweep: %zu points, %d failed\n", points.size(), failures);
  return failures == 0 ? kExitOk : kExitError;
}

int run_command(const RunConfig& cfg, const validation::Defects& defects) {
  try {
    switch (cfg.command) {
      case Command::bn: return run_bn(cfg);
      case Command::revival: return run_revival(cfg);
      case Command::evolve: return run_evolve(cfg);
      case Command::validate: return run_validate(cfg, defects);
      case Command::sweep: return run_sweep(cfg);
    }
    return kExitError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const specfun::ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const states::SeriesError& e) {
    std::cerr << "convergence failure: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const fock::TruncationError& e) {
    std::cerr << "truncation breach: " << e.what() << "\n";
    return kExitTruncation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace sqjcm::cli
