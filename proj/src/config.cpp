#include "sqjcm/config.hpp"

#include <json.hpp>

#include <fstream>
#include <set>

namespace sqjcm::cli {

using nlohmann::json;

std::string to_string(Command c) {
  switch (c) {
    case Command::bn: return "bn";
    case Command::revival: return "revival";
    case Command::evolve: return "evolve";
    case Command::validate: return "validate";
    case Command::sweep: return "sweep";
  }
  return "?";
}

Command command_from_string(const std::string& s) {
  if (s == "bn") return Command::bn;
  if (s == "revival") return Command::revival;
  if (s == "evolve") return Command::evolve;
  if (s == "validate") return Command::validate;
  if (s == "sweep") return Command::sweep;
  throw ConfigError("unknown command '" + s + "'");
}

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

double num(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("key '" + key + "' must be a number");
  return v.get<double>();
}

void apply_params(const json& obj, ModelParams& p) {
  static const std::set<std::string> allowed = {"a", "theta", "r", "phi",
                                                "b", "chi", "lambda", "delta"};
  reject_unknown(obj, allowed, "params");
  if (obj.contains("a")) p.a = num(obj["a"], "a");
  if (obj.contains("theta")) p.theta = num(obj["theta"], "theta");
  if (obj.contains("r")) p.r = num(obj["r"], "r");
  if (obj.contains("phi")) p.phi = num(obj["phi"], "phi");
  if (obj.contains("b")) p.b = num(obj["b"], "b");
  if (obj.contains("chi")) p.chi = num(obj["chi"], "chi");
  if (obj.contains("lambda")) p.lambda = num(obj["lambda"], "lambda");
  if (obj.contains("delta")) p.delta = num(obj["delta"], "delta");
}

}  // namespace

void RunConfig::check() const {
  try {
    params.validate();
    truncation.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (t_steps < 2) throw ConfigError("t_steps must be >= 2");
  if (!(t_max > 0.0)) throw ConfigError("t_max must be > 0");
  if (!(tail_target > 0.0) || tail_target > 1e-3)
    throw ConfigError("tail_target must lie in (0, 1e-3]");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  if (command == Command::sweep) {
    if (sweep_axes.empty()) throw ConfigError("sweep requires nonempty sweep_axes");
    static const std::set<std::string> fields = {"a", "theta", "r", "phi",
                                                 "b", "chi", "lambda", "delta"};
    std::size_t points = 1;
    for (const auto& ax : sweep_axes) {
      if (!fields.count(ax.field))
        throw ConfigError("sweep axis field '" + ax.field + "' is not a model parameter");
      if (ax.values.empty()) throw ConfigError("sweep axis '" + ax.field + "' has no values");
      points *= ax.values.size();
      if (points > 100000) throw ConfigError("sweep grid exceeds 1e5 points");
    }
    if (point_command != "bn" && point_command != "revival" && point_command != "evolve")
      throw ConfigError("point_command must be bn, revival or evolve");
  }
}

RunConfig parse_config_text(Command cmd, const std::string& json_text,
                            const FlagOverrides& flags) {
  RunConfig cfg;
  cfg.command = cmd;
  if (!json_text.empty()) {
    json root;
    try {
      root = json::parse(json_text);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("malformed JSON config: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be a JSON object");
    static const std::set<std::string> allowed = {
        "command",    "params",      "t_max",         "t_steps",
        "tail_target", "truncation", "output_dir",    "emit_svg",
        "jcm_compare", "quick",      "point_command", "sweep_axes",
        "jobs"};
    reject_unknown(root, allowed, "config");
    if (root.contains("command")) {
      Command file_cmd = command_from_string(root["command"].get<std::string>());
      if (file_cmd != cmd)
        throw ConfigError("config command '" + to_string(file_cmd) +
                          "' does not match the invoked subcommand '" + to_string(cmd) + "'");
    }
    if (root.contains("params")) apply_params(root["params"], cfg.params);
    if (root.contains("t_max")) cfg.t_max = num(root["t_max"], "t_max");
    if (root.contains("t_steps")) cfg.t_steps = root["t_steps"].get<int>();
    if (root.contains("tail_target")) cfg.tail_target = num(root["tail_target"], "tail_target");
    if (root.contains("truncation")) {
      const auto& tr = root["truncation"];
      reject_unknown(tr, {"retained", "buffer"}, "truncation");
      if (tr.contains("retained")) cfg.truncation.retained = tr["retained"].get<int>();
      if (tr.contains("buffer")) cfg.truncation.buffer = tr["buffer"].get<int>();
      else if (tr.contains("retained"))
        cfg.truncation.buffer = cfg.truncation.retained + std::max(64, cfg.truncation.retained / 8);
    }
    if (root.contains("output_dir")) cfg.output_dir = root["output_dir"].get<std::string>();
    if (root.contains("emit_svg")) cfg.emit_svg = root["emit_svg"].get<bool>();
    if (root.contains("jcm_compare")) cfg.jcm_compare = root["jcm_compare"].get<bool>();
    if (root.contains("quick")) cfg.quick = root["quick"].get<bool>();
    if (root.contains("point_command"))
      cfg.point_command = root["point_command"].get<std::string>();
    if (root.contains("jobs")) cfg.jobs = root["jobs"].get<int>();
    if (root.contains("sweep_axes")) {
      if (!root["sweep_axes"].is_array()) throw ConfigError("sweep_axes must be an array");
      for (const auto& ax : root["sweep_axes"]) {
        reject_unknown(ax, {"field", "values"}, "sweep_axes");
        SweepAxis a;
        if (!ax.contains("field") || !ax.contains("values"))
          throw ConfigError("each sweep axis needs 'field' and 'values'");
        a.field = ax["field"].get<std::string>();
        for (const auto& v : ax["values"]) a.values.push_back(v.get<double>());
        cfg.sweep_axes.push_back(std::move(a));
      }
    }
  }

  auto set = [](auto& dst, const auto& src) {
    if (src.has_value()) dst = *src;
  };
  set(cfg.params.a, flags.a);
  set(cfg.params.theta, flags.theta);
  set(cfg.params.r, flags.r);
  set(cfg.params.phi, flags.phi);
  set(cfg.params.b, flags.b);
  set(cfg.params.chi, flags.chi);
  set(cfg.params.lambda, flags.lambda);
  set(cfg.params.delta, flags.delta);
  set(cfg.t_max, flags.t_max);
  set(cfg.tail_target, flags.tail_target);
  set(cfg.t_steps, flags.t_steps);
  set(cfg.jobs, flags.jobs);
  if (flags.retained) {
    cfg.truncation.retained = *flags.retained;
    cfg.truncation.buffer = std::max(cfg.truncation.buffer,
                                     cfg.truncation.retained + std::max(64, cfg.truncation.retained / 8));
  }
  set(cfg.truncation.buffer, flags.buffer);
  set(cfg.output_dir, flags.out);
  set(cfg.emit_svg, flags.svg);
  set(cfg.jcm_compare, flags.jcm);
  set(cfg.quick, flags.quick);

  cfg.check();
  return cfg;
}

RunConfig parse_config(Command cmd, const std::string& config_path,
                       const FlagOverrides& flags) {
  std::string text;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config file '" + config_path + "'");
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return parse_config_text(cmd, text, flags);
}

}  // namespace sqjcm::cli
