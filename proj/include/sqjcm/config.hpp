// Run configuration: strict JSON config files with command-line overrides.

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqjcm/fock_oracle.hpp"
#include "sqjcm/model.hpp"

namespace sqjcm::cli {

enum class Command { bn, revival, evolve, validate, sweep };

std::string to_string(Command c);
Command command_from_string(const std::string& s);

struct SweepAxis {
  std::string field;  // a ModelParams field name
  std::vector<double> values;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  Command command = Command::revival;
  ModelParams params;
  double t_max = 30.0;
  int t_steps = 3000;
  double tail_target = 1e-8;
  fock::TruncationSpec truncation{512, 640};
  std::string output_dir = "out";
  bool emit_svg = false;
  bool jcm_compare = false;
  bool quick = false;                     // validate: no-squeeze fast subset
  std::string point_command = "revival";  // sweep: command run at each grid point
  std::vector<SweepAxis> sweep_axes;
  int jobs = 1;

  void check() const;  // invariants; throws ConfigError
};

/// Flags override config-file values field by field.
struct FlagOverrides {
  std::optional<double> a, theta, r, phi, b, chi, lambda, delta;
  std::optional<double> t_max, tail_target;
  std::optional<int> t_steps, retained, buffer, jobs;
  std::optional<std::string> out;
  std::optional<bool> svg, jcm, quick;
};

/// Load config_path (optional; empty means defaults), apply flag overrides,
/// validate. Unknown JSON keys are hard errors naming the key.
RunConfig parse_config(Command cmd, const std::string& config_path,
                       const FlagOverrides& flags);

/// Parse from an in-memory JSON string (the file path variant reads then calls this).
RunConfig parse_config_text(Command cmd, const std::string& json_text,
                            const FlagOverrides& flags);

}  // namespace sqjcm::cli
