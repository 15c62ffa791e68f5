#include "rbo/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include "rbo/errors.hpp"

namespace rbo {

using nlohmann::json;

namespace {

void check_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  check_object(j, where);
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

template <class T>
void read(const json& j, const char* key, std::optional<T>& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void read_range(const json& j, const char* key, Index& lo, Index& hi) {
  if (!j.contains(key)) return;
  const auto r = j.at(key).get<std::vector<Index>>();
  if (r.size() != 2 || r[0] < 0 || r[1] <= r[0]) throw ConfigError(std::string(key) + ": expected [lo, hi) with 0 <= lo < hi");
  lo = r[0];
  hi = r[1];
}

const std::set<std::string> kOptimizers{"rbo", "gd", "sgd", "sam"};

void check_optimizer(const std::string& name) {
  if (!kOptimizers.contains(name)) throw ConfigError("unknown optimizer '" + name + "'");
}

MlpSpec mlp_from_json(const json& j) {
  check_keys(j, {"layers", "activation"}, "mlp");
  MlpSpec spec;
  read(j, "layers", spec.layers);
  if (j.contains("activation")) spec.activation = activation_by_name(j.at("activation").get<std::string>());
  spec.validate();
  return spec;
}

template <class F>
auto guarded(const char* what, F&& parse) {
  try {
    return parse();
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

nlohmann::json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  try {
    json j = json::parse(in);
    check_object(j, path);
    return j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
}

void merge_into(json& base, const json& overrides) {
  if (!base.is_object() || !overrides.is_object()) {
    base = overrides;
    return;
  }
  for (const auto& [key, value] : overrides.items()) {
    if (base.contains(key) && base[key].is_object() && value.is_object()) {
      merge_into(base[key], value);
    } else {
      base[key] = value;
    }
  }
}

std::vector<double> log_space(double lo, double hi, int n) {
  if (n < 1) throw ConfigError("grid count must be >= 1");
  if (!(lo > 0.0) || !(hi >= lo)) throw ConfigError("log grid needs 0 < min <= max");
  if (n == 1) return {lo};
  std::vector<double> out(static_cast<std::size_t>(n));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

ProjectionConfig projection_from_json(const json& j) {
  return guarded("projection", [&] {
    check_keys(j, {"gamma", "gamma_rule", "max_iters", "grad_tol", "warm_start"}, "projection");
    ProjectionConfig cfg;
    read(j, "gamma", cfg.gamma);
    read(j, "max_iters", cfg.max_iters);
    read(j, "grad_tol", cfg.grad_tol);
    if (j.contains("gamma_rule")) {
      const auto rule = j.at("gamma_rule").get<std::string>();
      if (rule == "fixed") {
        cfg.gamma_rule = GammaRule::fixed;
      } else if (rule == "gradient_scaled") {
        cfg.gamma_rule = GammaRule::gradient_scaled;
      } else {
        throw ConfigError("projection: unknown gamma_rule '" + rule + "'");
      }
    }
    if (j.contains("warm_start")) {
      const auto ws = j.at("warm_start").get<std::string>();
      if (ws == "previous_contact") {
        cfg.warm_start = WarmStart::previous_contact;
      } else if (ws == "candidate_theta") {
        cfg.warm_start = WarmStart::candidate_theta;
      } else {
        throw ConfigError("projection: unknown warm_start '" + ws + "'");
      }
    }
    validate(cfg);
    return cfg;
  });
}

json to_json(const RunConfig& cfg) {
  json j = {{"landscape", {{"id", cfg.landscape.id}, {"params", cfg.landscape.params}}},
            {"optimizer", cfg.optimizer},
            {"theta0", cfg.theta0},
            {"steps", cfg.steps},
            {"seed", cfg.seed},
            {"projection", to_json(cfg.projection)},
            {"output", cfg.output},
            {"format", cfg.format}};
  if (cfg.rho) j["rho"] = *cfg.rho;
  if (cfg.eta) j["eta"] = *cfg.eta;
  if (cfg.sam_rho) j["sam_rho"] = *cfg.sam_rho;
  return j;
}

RunConfig run_config_from_json(const json& j) {
  return guarded("run config", [&] {
    check_keys(j,
               {"landscape", "optimizer", "theta0", "rho", "eta", "sam_rho", "steps", "seed", "projection", "output",
                "format"},
               "run config");
    RunConfig cfg;
    if (j.contains("landscape")) {
      const json& l = j.at("landscape");
      check_keys(l, {"id", "params"}, "landscape");
      read(l, "id", cfg.landscape.id);
      if (l.contains("params")) {
        check_object(l.at("params"), "landscape.params");
        cfg.landscape.params = l.at("params");
      }
    }
    read(j, "optimizer", cfg.optimizer);
    check_optimizer(cfg.optimizer);
    read(j, "theta0", cfg.theta0);
    read(j, "rho", cfg.rho);
    read(j, "eta", cfg.eta);
    read(j, "sam_rho", cfg.sam_rho);
    read(j, "steps", cfg.steps);
    read(j, "seed", cfg.seed);
    read(j, "output", cfg.output);
    read(j, "format", cfg.format);
    if (j.contains("projection")) cfg.projection = projection_from_json(j.at("projection"));

    if (cfg.rho && cfg.optimizer != "rbo") throw ConfigError("rho only applies to optimizer rbo");
    if (cfg.sam_rho && cfg.optimizer != "sam") throw ConfigError("sam_rho only applies to optimizer sam");
    if (cfg.rho && !(*cfg.rho > 0.0)) throw ConfigError("rho must be > 0");
    if (cfg.sam_rho && !(*cfg.sam_rho >= 0.0)) throw ConfigError("sam_rho must be >= 0");
    if (cfg.eta && !std::isfinite(*cfg.eta)) throw ConfigError("eta must be finite");
    if (cfg.steps < 1) throw ConfigError("steps must be >= 1");
    if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("unknown format '" + cfg.format + "'");
    return cfg;
  });
}

std::string DataConfig::images_path() const {
  if (!images.empty()) return images;
  std::string dir = data_dir;
  if (dir.empty()) {
    const char* env = std::getenv("RBO_DATA_DIR");
    dir = env != nullptr ? env : ".";
  }
  return dir + "/train-images-idx3-ubyte";
}

std::string DataConfig::labels_path() const {
  if (!labels.empty()) return labels;
  std::string dir = data_dir;
  if (dir.empty()) {
    const char* env = std::getenv("RBO_DATA_DIR");
    dir = env != nullptr ? env : ".";
  }
  return dir + "/train-labels-idx1-ubyte";
}

TrainSettings train_settings_from_json(const json& j) {
  return guarded("train config", [&] {
    check_keys(j,
               {"mlp", "optimizer", "rho", "eta", "sam_rho", "epochs", "batch_size", "seed", "projection", "data",
                "output"},
               "train config");
    TrainSettings s;
    if (j.contains("mlp")) s.mlp = mlp_from_json(j.at("mlp"));
    TrainConfig& t = s.train;
    read(j, "optimizer", t.optimizer);
    check_optimizer(t.optimizer);
    t.eta = t.optimizer == "rbo" ? 6.0 : 0.01;
    read(j, "rho", t.rho);
    read(j, "eta", t.eta);
    read(j, "sam_rho", t.sam_rho);
    read(j, "epochs", t.epochs);
    read(j, "batch_size", t.batch_size);
    std::uint64_t seed = 0;
    read(j, "seed", seed);
    // One seed fans out: initialization at seed, minibatch order at seed + 1.
    s.mlp.seed = seed;
    t.seed = seed + 1;
    if (j.contains("projection")) t.projection = projection_from_json(j.at("projection"));
    if (j.contains("data")) {
      const json& d = j.at("data");
      check_keys(d, {"dir", "images", "labels", "train_range", "val_range"}, "data");
      read(d, "dir", s.data.data_dir);
      read(d, "images", s.data.images);
      read(d, "labels", s.data.labels);
      read_range(d, "train_range", s.data.train_lo, s.data.train_hi);
      read_range(d, "val_range", s.data.val_lo, s.data.val_hi);
    }
    read(j, "output", s.output);
    if (t.epochs < 0) throw ConfigError("epochs must be >= 0");
    if (t.batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (t.optimizer == "rbo" && !(t.rho > 0.0)) throw ConfigError("rho must be > 0");
    return s;
  });
}

std::vector<double> SweepConfig::rho_grid() const { return log_space(rho_min, rho_max, rho_count); }

std::vector<double> SweepConfig::eta_grid(double rho) const {
  return log_space(eta_min_factor * rho, eta_max_factor * rho, eta_count);
}

SweepConfig sweep_config_from_json(const json& j) {
  return guarded("sweep config", [&] {
    check_keys(j, {"task", "run", "train", "rho", "eta", "epochs", "parallelism", "output"}, "sweep config");
    SweepConfig s;
    read(j, "task", s.task);
    if (s.task != "landscape" && s.task != "mlp") throw ConfigError("sweep: unknown task '" + s.task + "'");
    if (j.contains("run")) s.run = run_config_from_json(j.at("run"));
    if (s.run.rho || s.run.eta) throw ConfigError("sweep: rho and eta come from the sweep grid, not from run");
    if (j.contains("train")) s.mlp = train_settings_from_json(j.at("train"));
    if (j.contains("rho")) {
      const json& r = j.at("rho");
      check_keys(r, {"min", "max", "count"}, "sweep.rho");
      read(r, "min", s.rho_min);
      read(r, "max", s.rho_max);
      read(r, "count", s.rho_count);
    }
    if (j.contains("eta")) {
      const json& e = j.at("eta");
      check_keys(e, {"min_factor", "max_factor", "count"}, "sweep.eta");
      read(e, "min_factor", s.eta_min_factor);
      read(e, "max_factor", s.eta_max_factor);
      read(e, "count", s.eta_count);
    }
    read(j, "epochs", s.epochs);
    read(j, "parallelism", s.parallelism);
    read(j, "output", s.output);
    if (!(s.rho_min < s.rho_max) && s.rho_count > 1) throw ConfigError("sweep: rho min must be < max");
    if (!(s.eta_min_factor < s.eta_max_factor) && s.eta_count > 1) throw ConfigError("sweep: eta min must be < max");
    s.rho_grid();
    s.eta_grid(s.rho_min);
    if (s.epochs < 0) throw ConfigError("sweep: epochs must be >= 0");
    if (s.parallelism < 0) throw ConfigError("sweep: parallelism must be >= 0");
    return s;
  });
}

}  // namespace rbo
