#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbo/config.hpp"

namespace rbo {

enum ExitCode : int {
  kExitOk = 0,
  kExitChecksFailed = 1,
  kExitConfigError = 2,
  kExitRunError = 3,
  kExitIoError = 4,
};

// Runs `body` and maps escaping exceptions to exit codes, printing the
// message to `log`.
int guarded_command(std::ostream& log, const std::function<int()>& body);

// Runs one optimizer and writes its trajectory (file or `out`).
int cmd_trajectory(const RunConfig& cfg, std::ostream& out, std::ostream& log);

// (rho, eta) grid; one row per cell sorted by (rho, eta). A failed cell gets
// a NaN metric and an error message, and the sweep goes on.
int cmd_sweep(const SweepConfig& cfg, std::ostream& out, std::ostream& log);

const std::vector<std::string>& check_names();

// Runs the named checks ("all" for every check) with per-check parameters
// from `config` (keyed by check name). Writes the JSON reports to `output`
// (or `out`); exit 0 iff every check passed.
int cmd_verify(const std::vector<std::string>& checks, const nlohmann::json& config, const std::string& output,
               std::ostream& out, std::ostream& log);

// Trains the MLP and writes the learning curve, one row per epoch.
int cmd_train(const TrainSettings& settings, std::ostream& out, std::ostream& log);

struct OffsetRequest {
  LandscapeSpec landscape{"riemann", {{"N", 100}}};
  std::vector<double> radii{1.0};
  double lo = 0.0;
  double hi = 6.283185307179586;
  double grid_step = 1e-3;  // clamped to rho / 100
  // "offset" emits phi_rho; "unreachable" emits the reachability state.
  std::string mode = "offset";
  double theta_step = 0.01;  // unreachable mode only
  double angular_step = 1e-3;
  std::string output;
};

// Keys: landscape {id, params}, radii, interval [lo, hi], grid_step, mode,
// theta_step, angular_step, output.
OffsetRequest offset_request_from_json(const nlohmann::json& j);

int cmd_offset(const OffsetRequest& req, std::ostream& out, std::ostream& log);

}  // namespace rbo
