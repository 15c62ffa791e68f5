#pragma once

// Run, sweep, train and verify configurations. A config file is a JSON
// object; command-line flags are merged into it before parsing, so flags
// win. Unknown keys are rejected.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbo/landscape.hpp"
#include "rbo/mlp.hpp"
#include "rbo/optimizer.hpp"
#include "rbo/training.hpp"

namespace rbo {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reads a JSON object from `path`; ConfigError on IO or syntax errors.
nlohmann::json load_config_file(const std::string& path);

struct LandscapeSpec {
  std::string id = "quadratic";
  nlohmann::json params = nlohmann::json::object();

  bool operator==(const LandscapeSpec&) const = default;
};

struct RunConfig {
  LandscapeSpec landscape;
  std::string optimizer = "rbo";  // rbo | gd | sgd | sam
  std::vector<double> theta0;     // empty: all ones
  std::optional<double> rho;      // rbo only, default 1
  std::optional<double> eta;      // default 6 for rbo, 0.01 otherwise
  std::optional<double> sam_rho;  // sam only, default 0.05
  int steps = 100;
  std::uint64_t seed = 0;
  ProjectionConfig projection;
  std::string output;  // empty: standard output
  std::string format = "csv";

  bool operator==(const RunConfig&) const = default;

  double resolved_rho() const { return rho.value_or(1.0); }
  double resolved_eta() const { return eta.value_or(optimizer == "rbo" ? 6.0 : 0.01); }
  double resolved_sam_rho() const { return sam_rho.value_or(0.05); }
};

nlohmann::json to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const nlohmann::json& j);

ProjectionConfig projection_from_json(const nlohmann::json& j);

struct DataConfig {
  std::string data_dir;  // empty: $RBO_DATA_DIR, then "."
  std::string images;    // empty: <data_dir>/train-images-idx3-ubyte
  std::string labels;    // empty: <data_dir>/train-labels-idx1-ubyte
  Index train_lo = 0;
  Index train_hi = 50000;
  Index val_lo = 50000;
  Index val_hi = 60000;

  bool operator==(const DataConfig&) const = default;

  std::string images_path() const;
  std::string labels_path() const;
};

struct TrainSettings {
  MlpSpec mlp;
  TrainConfig train;
  DataConfig data;
  std::string output;  // learning-curve CSV; empty: standard output
};

TrainSettings train_settings_from_json(const nlohmann::json& j);

struct SweepConfig {
  std::string task = "landscape";  // landscape | mlp
  RunConfig run;                   // task landscape: landscape, optimizer, theta0, steps, projection
  TrainSettings mlp;               // task mlp
  double rho_min = 0.1;
  double rho_max = 10.0;
  int rho_count = 5;
  // eta log-spaced in [eta_min_factor * rho, eta_max_factor * rho].
  double eta_min_factor = 0.01;
  double eta_max_factor = 10.0;
  int eta_count = 5;
  int epochs = 3;
  int parallelism = 0;  // 0: all available threads
  std::string output;

  std::vector<double> rho_grid() const;
  std::vector<double> eta_grid(double rho) const;
};

SweepConfig sweep_config_from_json(const nlohmann::json& j);

// n log-spaced values from lo to hi (both included); {lo} when n == 1.
std::vector<double> log_space(double lo, double hi, int n);

// Merge `overrides` into `base` recursively (objects merge, other values replace).
void merge_into(nlohmann::json& base, const nlohmann::json& overrides);

}  // namespace rbo
