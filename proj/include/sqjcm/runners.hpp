// Subcommand runners: produce artifact files plus a manifest in the output
// directory and map failures onto the documented exit codes.

#pragma once

#include "sqjcm/config.hpp"
#include "sqjcm/validation.hpp"

namespace sqjcm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;        // unexpected failure
inline constexpr int kExitConfig = 2;       // malformed configuration
inline constexpr int kExitConvergence = 3;  // series convergence failure
inline constexpr int kExitTruncation = 4;   // Fock ceiling breach
inline constexpr int kExitValidation = 5;   // validation check failure

int run_bn(const RunConfig& cfg);
int run_revival(const RunConfig& cfg);
int run_evolve(const RunConfig& cfg);
int run_validate(const RunConfig& cfg, const validation::Defects& defects = {});
int run_sweep(const RunConfig& cfg);

/// Dispatch on cfg.command with exit-code mapping for stray errors.
int run_command(const RunConfig& cfg, const validation::Defects& defects = {});

}  // namespace sqjcm::cli
