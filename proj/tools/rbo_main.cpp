// rbo: command-line front end.
//
//   rbo trajectory --landscape riemann --param N=100 --rho 1 --eta 0.1 --steps 500 --out traj.csv
//   rbo sweep --config sweep.json --out grid.csv
//   rbo verify weak-ironing sharp-minima --out reports.json
//   rbo train --optimizer rbo --epochs 10 --data-dir ~/mnist --out curve.csv
//   rbo offset --landscape riemann --rho 0.1,1,10 --interval=0:6.283 --grid-step 1e-3
//
// Every subcommand accepts --config FILE (a JSON object); flags given on the
// command line override the file.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rbo/commands.hpp"
#include "rbo/config.hpp"

using nlohmann::json;

namespace {

json parse_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return text;
  }
}

json params_from(const std::vector<std::string>& pairs) {
  json out = json::object();
  for (const auto& kv : pairs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw rbo::ConfigError("--param expects key=value, got '" + kv + "'");
    out[kv.substr(0, eq)] = parse_value(kv.substr(eq + 1));
  }
  return out;
}

// "A:B" -> [A, B].
json range_from(const std::string& text, const char* flag) {
  const auto colon = text.find(':', 1);
  if (colon == std::string::npos) throw rbo::ConfigError(std::string(flag) + " expects A:B, got '" + text + "'");
  try {
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw rbo::ConfigError(std::string(flag) + " expects A:B, got '" + text + "'");
  }
}

json index_range_from(const std::string& text, const char* flag) {
  const json r = range_from(text, flag);
  return {static_cast<long long>(r[0].get<double>()), static_cast<long long>(r[1].get<double>())};
}

json base_config(const std::string& path) { return path.empty() ? json::object() : rbo::load_config_file(path); }

template <class T>
void set_if(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

struct DataFlags {
  std::string dir, images, labels, train_range, val_range;

  void add(CLI::App* cmd) {
    cmd->add_option("--data-dir", dir, "Directory with train-images-idx3-ubyte / train-labels-idx1-ubyte (default $RBO_DATA_DIR)");
    cmd->add_option("--images", images, "IDX image file");
    cmd->add_option("--labels", labels, "IDX label file");
    cmd->add_option("--train-range", train_range, "Training rows A:B (default 0:50000)");
    cmd->add_option("--val-range", val_range, "Validation rows A:B (default 50000:60000)");
  }

  json overrides() const {
    json d = json::object();
    if (!dir.empty()) d["dir"] = dir;
    if (!images.empty()) d["images"] = images;
    if (!labels.empty()) d["labels"] = labels;
    if (!train_range.empty()) d["train_range"] = index_range_from(train_range, "--train-range");
    if (!val_range.empty()) d["val_range"] = index_range_from(val_range, "--val-range");
    return d;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rolling ball optimizer: trajectories, sweeps, geometric checks and MLP training"};
  app.require_subcommand(1);
  int exit_code = rbo::kExitOk;

  // trajectory -------------------------------------------------------------
  auto* traj = app.add_subcommand("trajectory", "Run one optimizer and write its trajectory");
  struct {
    std::string config, landscape, optimizer, out, format;
    std::vector<std::string> params;
    std::vector<double> theta0;
    std::optional<double> rho, eta, sam_rho;
    std::optional<int> steps;
    std::optional<std::uint64_t> seed;
  } t;
  traj->add_option("--config", t.config, "JSON run config");
  traj->add_option("--landscape", t.landscape, "Landscape id (quadratic, riemann, sinusoid, constant, affine_plus_bump)");
  traj->add_option("--param", t.params, "Landscape parameter key=value (repeatable)");
  traj->add_option("--optimizer", t.optimizer, "rbo | gd | sam | sgd");
  traj->add_option("--theta0", t.theta0, "Initial point")->delimiter(',');
  traj->add_option("--rho", t.rho, "Ball radius (rbo, default 1)");
  traj->add_option("--eta", t.eta, "Step size (default 6 for rbo, 0.01 otherwise)");
  traj->add_option("--sam-rho", t.sam_rho, "Ascent radius (sam, default 0.05)");
  traj->add_option("--steps,-T", t.steps, "Number of updates");
  traj->add_option("--seed", t.seed, "Seed");
  traj->add_option("--out", t.out, "Output file (default stdout)");
  traj->add_option("--format", t.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  traj->callback([&] {
    exit_code = rbo::guarded_command(std::cerr, [&] {
      json j = base_config(t.config);
      json o = json::object();
      if (!t.landscape.empty()) o["landscape"]["id"] = t.landscape;
      if (!t.params.empty()) o["landscape"]["params"] = params_from(t.params);
      if (!t.optimizer.empty()) o["optimizer"] = t.optimizer;
      if (!t.theta0.empty()) o["theta0"] = t.theta0;
      set_if(o, "rho", t.rho);
      set_if(o, "eta", t.eta);
      set_if(o, "sam_rho", t.sam_rho);
      set_if(o, "steps", t.steps);
      set_if(o, "seed", t.seed);
      if (!t.out.empty()) o["output"] = t.out;
      if (!t.format.empty()) o["format"] = t.format;
      rbo::merge_into(j, o);
      return rbo::cmd_trajectory(rbo::run_config_from_json(j), std::cout, std::cerr);
    });
  });

  // sweep ------------------------------------------------------------------
  auto* sweep = app.add_subcommand("sweep", "Grid over (rho, eta); CSV rows sorted by (rho, eta)");
  struct {
    std::string config, task, landscape, optimizer, out;
    std::vector<std::string> params;
    std::vector<double> theta0;
    std::optional<int> steps, rho_count, eta_count, epochs, parallelism;
    std::optional<double> rho_min, rho_max, eta_min, eta_max;
    std::optional<std::uint64_t> seed;
    DataFlags data;
  } s;
  sweep->add_option("--config", s.config, "JSON sweep config");
  sweep->add_option("--task", s.task, "landscape | mlp")->check(CLI::IsMember({"landscape", "mlp"}));
  sweep->add_option("--landscape", s.landscape, "Landscape id (task landscape)");
  sweep->add_option("--param", s.params, "Landscape parameter key=value (repeatable)");
  sweep->add_option("--optimizer", s.optimizer, "Optimizer of every cell");
  sweep->add_option("--theta0", s.theta0, "Initial point")->delimiter(',');
  sweep->add_option("--steps,-T", s.steps, "Updates per cell (task landscape)");
  sweep->add_option("--rho-min", s.rho_min, "Smallest radius (default 0.1)");
  sweep->add_option("--rho-max", s.rho_max, "Largest radius (default 10)");
  sweep->add_option("--rho-count", s.rho_count, "Number of radii (default 5)");
  sweep->add_option("--eta-min-factor", s.eta_min, "Smallest eta / rho (default 0.01)");
  sweep->add_option("--eta-max-factor", s.eta_max, "Largest eta / rho (default 10)");
  sweep->add_option("--eta-count", s.eta_count, "Number of step sizes per radius (default 5)");
  sweep->add_option("--epochs", s.epochs, "Epochs per cell (task mlp, default 3)");
  sweep->add_option("--parallelism", s.parallelism, "Threads (0 = all)");
  sweep->add_option("--seed", s.seed, "Seed");
  sweep->add_option("--out", s.out, "Output CSV (default stdout)");
  s.data.add(sweep);
  sweep->callback([&] {
    exit_code = rbo::guarded_command(std::cerr, [&] {
      json j = base_config(s.config);
      json o = json::object();
      if (!s.task.empty()) o["task"] = s.task;
      json run = json::object();
      if (!s.landscape.empty()) run["landscape"]["id"] = s.landscape;
      if (!s.params.empty()) run["landscape"]["params"] = params_from(s.params);
      if (!s.optimizer.empty()) run["optimizer"] = s.optimizer;
      if (!s.theta0.empty()) run["theta0"] = s.theta0;
      set_if(run, "steps", s.steps);
      set_if(run, "seed", s.seed);
      if (!run.empty()) o["run"] = run;
      json train = json::object();
      if (!s.optimizer.empty()) train["optimizer"] = s.optimizer;
      set_if(train, "seed", s.seed);
      if (const json d = s.data.overrides(); !d.empty()) train["data"] = d;
      if (!train.empty()) o["train"] = train;
      json rho = json::object();
      set_if(rho, "min", s.rho_min);
      set_if(rho, "max", s.rho_max);
      set_if(rho, "count", s.rho_count);
      if (!rho.empty()) o["rho"] = rho;
      json eta = json::object();
      set_if(eta, "min_factor", s.eta_min);
      set_if(eta, "max_factor", s.eta_max);
      set_if(eta, "count", s.eta_count);
      if (!eta.empty()) o["eta"] = eta;
      set_if(o, "epochs", s.epochs);
      set_if(o, "parallelism", s.parallelism);
      if (!s.out.empty()) o["output"] = s.out;
      rbo::merge_into(j, o);
      return rbo::cmd_sweep(rbo::sweep_config_from_json(j), std::cout, std::cerr);
    });
  });

  // verify -----------------------------------------------------------------
  auto* verify = app.add_subcommand("verify", "Run geometric checks; exit 0 iff all pass");
  struct {
    std::vector<std::string> checks;
    std::string config, out, interval;
    std::optional<double> grid_step;
  } v;
  verify->add_option("checks", v.checks, "Checks to run (default all): weak-ironing linear-ironing sharp-minima "
                                         "open-unreachables gd-limit smoothing");
  verify->add_option("--config", v.config, "JSON object keyed by check name");
  verify->add_option("--out", v.out, "JSON report file (default stdout)");
  verify->add_option("--interval", v.interval, "Smoothing interval A:B (default 0:2pi)");
  verify->add_option("--grid-step", v.grid_step, "Smoothing grid step");
  verify->callback([&] {
    exit_code = rbo::guarded_command(std::cerr, [&] {
      json j = base_config(v.config);
      json o = json::object();
      if (!v.interval.empty()) o["smoothing"]["interval"] = range_from(v.interval, "--interval");
      if (v.grid_step) o["smoothing"]["grid_step"] = *v.grid_step;
      rbo::merge_into(j, o);
      return rbo::cmd_verify(v.checks, j, v.out, std::cout, std::cerr);
    });
  });

  // train ------------------------------------------------------------------
  auto* train = app.add_subcommand("train", "Train the MLP and write a per-epoch learning curve");
  struct {
    std::string config, optimizer, activation, out;
    std::vector<long long> hidden;
    std::optional<double> rho, eta, sam_rho;
    std::optional<int> epochs;
    std::optional<long long> batch_size;
    std::optional<std::uint64_t> seed;
    DataFlags data;
  } tr;
  train->add_option("--config", tr.config, "JSON train config");
  train->add_option("--optimizer", tr.optimizer, "rbo | sgd | sam | gd");
  train->add_option("--rho", tr.rho, "Ball radius (rbo, default 1)");
  train->add_option("--eta", tr.eta, "Step size (default 6 for rbo, 0.01 otherwise)");
  train->add_option("--sam-rho", tr.sam_rho, "Ascent radius (sam)");
  train->add_option("--epochs", tr.epochs, "Epochs (default 10)");
  train->add_option("--batch-size", tr.batch_size, "Minibatch size (default 128)");
  train->add_option("--hidden", tr.hidden, "Hidden layer sizes (default 256,256)")->delimiter(',');
  train->add_option("--activation", tr.activation, "relu | tanh")->check(CLI::IsMember({"relu", "tanh"}));
  train->add_option("--seed", tr.seed, "Seed");
  train->add_option("--out", tr.out, "Learning-curve CSV (default stdout)");
  tr.data.add(train);
  train->callback([&] {
    exit_code = rbo::guarded_command(std::cerr, [&] {
      json j = base_config(tr.config);
      json o = json::object();
      if (!tr.optimizer.empty()) o["optimizer"] = tr.optimizer;
      set_if(o, "rho", tr.rho);
      set_if(o, "eta", tr.eta);
      set_if(o, "sam_rho", tr.sam_rho);
      set_if(o, "epochs", tr.epochs);
      set_if(o, "batch_size", tr.batch_size);
      set_if(o, "seed", tr.seed);
      if (!tr.hidden.empty()) {
        json layers = json::array({784});
        for (auto h : tr.hidden) layers.push_back(h);
        layers.push_back(10);
        o["mlp"]["layers"] = layers;
      }
      if (!tr.activation.empty()) o["mlp"]["activation"] = tr.activation;
      if (const json d = tr.data.overrides(); !d.empty()) o["data"] = d;
      if (!tr.out.empty()) o["output"] = tr.out;
      rbo::merge_into(j, o);
      return rbo::cmd_train(rbo::train_settings_from_json(j), std::cout, std::cerr);
    });
  });

  // offset -----------------------------------------------------------------
  auto* offset = app.add_subcommand("offset", "Dump offset samples (or reachability flags) for plotting");
  struct {
    std::string config, landscape, interval, mode, out;
    std::vector<std::string> params;
    std::vector<double> radii;
    std::optional<double> grid_step, theta_step, angular_step;
  } of;
  offset->add_option("--config", of.config, "JSON offset config");
  offset->add_option("--landscape", of.landscape, "1D landscape id (default riemann)");
  offset->add_option("--param", of.params, "Landscape parameter key=value (repeatable)");
  offset->add_option("--rho", of.radii, "Radii")->delimiter(',');
  offset->add_option("--interval", of.interval, "Theta interval A:B (default 0:2pi); write --interval=-1:1 for negatives");
  offset->add_option("--grid-step", of.grid_step, "Grid step (clamped to rho/100)");
  offset->add_option("--mode", of.mode, "offset | unreachable")->check(CLI::IsMember({"offset", "unreachable"}));
  offset->add_option("--theta-step", of.theta_step, "Theta spacing in unreachable mode");
  offset->add_option("--angular-step", of.angular_step, "Sphere sampling step in unreachable mode");
  offset->add_option("--out", of.out, "Output CSV (default stdout)");
  offset->callback([&] {
    exit_code = rbo::guarded_command(std::cerr, [&] {
      json j = base_config(of.config);
      json o = json::object();
      if (!of.landscape.empty()) o["landscape"]["id"] = of.landscape;
      if (!of.params.empty()) o["landscape"]["params"] = params_from(of.params);
      if (!of.radii.empty()) o["radii"] = of.radii;
      if (!of.interval.empty()) o["interval"] = range_from(of.interval, "--interval");
      set_if(o, "grid_step", of.grid_step);
      if (!of.mode.empty()) o["mode"] = of.mode;
      set_if(o, "theta_step", of.theta_step);
      set_if(o, "angular_step", of.angular_step);
      if (!of.out.empty()) o["output"] = of.out;
      rbo::merge_into(j, o);
      return rbo::cmd_offset(rbo::offset_request_from_json(j), std::cout, std::cerr);
    });
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? rbo::kExitOk : rbo::kExitConfigError;
  }
  return exit_code;
}
