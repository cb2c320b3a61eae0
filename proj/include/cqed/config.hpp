#pragma once

#include <stdexcept>
#include <string>

#include "cqed/experiments.hpp"

// Config parsing and the run manifest.
//
// Config files are sectioned key = value text. Every physical frequency or
// rate key must carry an explicit per-key unit flag on the same line:
//
//   [params]
//   omega_c = 2.69e9 angular=false    # Hz -> multiplied by 2*pi on load
//   chi_s   = 1.634e7 angular=true    # already rad/s, used as-is
//   eta_s   = 1e4 angular=false       # jump rate in events/s, used as-is
//
// angular=false means "the number is in the printed, non-angular convention
// for that quantity": cycles/s for frequencies and drive amplitudes (x 2*pi
// on load), plain events/s for the optical-cooling jump rates (no factor).
// Omitting the flag on an ambiguous key is an error, not a default.

namespace cqed {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, int line = 0)
      : std::runtime_error(line > 0 ? msg + " (line " + std::to_string(line) + ")"
                                    : msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = 0;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parse a config whose [run] section names the experiment.
ExperimentSpec parse_config(const std::string& path);
/// Parse a config for a fixed experiment kind (the CLI subcommand); a
/// conflicting [run] experiment key is an error.
ExperimentSpec parse_config(const std::string& path, ExperimentKind kind);

/// Everything needed to reproduce a run: resolved spec (all rad/s), the
/// constants table, tool version and outcome counters. Serializes to JSON
/// losslessly.
struct RunManifest {
  std::string tool_version;
  ExperimentSpec spec;
  double wall_time_s = 0;
  int total_points = 0;
  int nonconverged_points = 0;
  std::vector<std::string> errors;
};

RunManifest make_manifest(const ExperimentSpec& spec, const RunDiagnostics& diag);

std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);

}  // namespace cqed
