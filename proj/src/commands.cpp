#include "rbo/commands.hpp"

#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include <omp.h>

#include "rbo/errors.hpp"
#include "rbo/geometry.hpp"
#include "rbo/idx.hpp"
#include "rbo/mlp_landscape.hpp"
#include "rbo/trajectory_io.hpp"
#include "rbo/verify.hpp"

namespace rbo {

using nlohmann::json;

namespace {

// Writes through `write` into `path`, or into `fallback` when path is empty.
void emit(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(fallback);
    fallback.flush();
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  write(file);
  file.flush();
  if (!file) throw IoError("write failed for '" + path + "'");
}

std::string csv_field(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

Vector start_point(const std::vector<double>& theta0, Index dim) {
  if (theta0.empty()) return Vector::Ones(dim);
  if (static_cast<Index>(theta0.size()) != dim) {
    throw ConfigError("theta0 has " + std::to_string(theta0.size()) + " entries, landscape dimension is " +
                      std::to_string(dim));
  }
  return Eigen::Map<const Vector>(theta0.data(), dim);
}

Trajectory run_config(const RunConfig& cfg, const Landscape& f) {
  const Vector theta0 = start_point(cfg.theta0, f.dim());
  Trajectory tr;
  if (cfg.optimizer == "rbo") {
    tr = run_rbo(f, theta0, cfg.resolved_rho(), cfg.resolved_eta(), cfg.steps, cfg.projection);
  } else if (cfg.optimizer == "gd") {
    tr = run_gd(f, theta0, cfg.resolved_eta(), cfg.steps);
  } else if (cfg.optimizer == "sam") {
    tr = run_sam(f, theta0, cfg.resolved_eta(), cfg.resolved_sam_rho(), cfg.steps);
  } else {
    const auto* stochastic = dynamic_cast<const StochasticLandscape*>(&f);
    if (stochastic == nullptr) throw ConfigError("optimizer sgd needs a stochastic landscape; use `train` for the MLP");
    tr = run_sgd(*stochastic, theta0, cfg.resolved_eta(), cfg.steps, cfg.seed);
  }
  tr.header.seed = cfg.seed;
  return tr;
}

struct Split {
  std::shared_ptr<const Dataset> train;
  Dataset validation;
};

Split load_split(const DataConfig& d) {
  const Dataset all = load_idx(d.images_path(), d.labels_path());
  if (d.train_hi > all.size() || d.val_hi > all.size()) {
    throw ConfigError("data ranges exceed the " + std::to_string(all.size()) + " samples of '" + d.images_path() + "'");
  }
  return {std::make_shared<const Dataset>(all.slice(d.train_lo, d.train_hi)), all.slice(d.val_lo, d.val_hi)};
}

template <class Cell>
void for_each_cell(std::size_t count, int parallelism, Cell&& cell) {
  const int threads = parallelism > 0 ? parallelism : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::size_t i = 0; i < count; ++i) cell(i);
}

// ---------------------------------------------------------------------------
// verify

json check_defaults(const std::string& name) {
  if (name == "weak-ironing") {
    return {{"landscape", {{"id", "sinusoid"}, {"params", json::object()}}},
            {"radii", {10.0, 100.0, 1000.0}},
            {"k", {-1.0, 1.0}},
            {"theta_step", 0.01},
            {"grid_fraction", 1.0 / 2000.0},
            {"epsilon", 0.01},
            {"maximizer_distance", 1.0 + std::numbers::pi / 2.0}};
  }
  if (name == "linear-ironing") {
    return {{"slope", 1.0},   {"intercept", 0.0}, {"profile", "sin"}, {"amplitude", 1.0}, {"radii", {1.0, 10.0, 100.0}},
            {"k", {-1.0, 1.0}}, {"grid_step", 1e-3}, {"epsilon", 0.1}};
  }
  if (name == "sharp-minima") {
    return {{"sigmas", {1.0, 2.0, 4.0}}, {"radii", {1.2, 0.8}}, {"relative", true},
            {"margin", 0.1},             {"angular_step", 1e-3}, {"graph_step", 1e-4}};
  }
  if (name == "open-unreachables") {
    return {{"landscape", {{"id", "quadratic"}, {"params", {{"A", {{4.0}}}}}}},
            {"theta0", 0.0},
            {"rho", 0.5},
            {"delta", 1e-3},
            {"max_k", 10},
            {"angular_step", 1e-3},
            {"graph_step", 1e-4}};
  }
  if (name == "gd-limit") {
    return {{"landscape", {{"id", "quadratic"}, {"params", {{"A", {{1.0}}}}}}},
            {"theta0", {1.0}},
            {"eta", 0.1},
            {"steps", 50},
            {"radii", {1e-1, 1e-2, 1e-3, 1e-4}},
            {"epsilon", 1e-2},
            {"projection", {{"gamma", 1.0}, {"max_iters", 1000}, {"grad_tol", 1e-12}}},
            {"informational", false}};
  }
  if (name == "smoothing") {
    return {{"N", 100}, {"radii", {0.01, 0.1, 1.0, 10.0}}, {"interval", {0.0, 2.0 * std::numbers::pi}}, {"grid_step", 1e-3}};
  }
  throw ConfigError("unknown check '" + name + "'");
}

LandscapePtr landscape_from(const json& j) {
  return make_landscape(j.at("id").get<std::string>(), j.value("params", json::object()));
}

std::pair<double, double> pair_from(const json& j, const char* key) {
  const auto v = j.at(key).get<std::vector<double>>();
  if (v.size() != 2 || !(v[0] < v[1])) throw ConfigError(std::string(key) + ": expected [lo, hi] with lo < hi");
  return {v[0], v[1]};
}

CheckReport run_check(const std::string& name, const json& p) {
  if (name == "weak-ironing") {
    WeakIroningConfig cfg;
    cfg.theta_step = p.at("theta_step");
    cfg.grid_fraction = p.at("grid_fraction");
    cfg.epsilon = p.at("epsilon");
    if (p.contains("sup")) cfg.sup = p.at("sup").get<double>();
    if (p.contains("maximizer_distance")) cfg.maximizer_distance = p.at("maximizer_distance").get<double>();
    const auto [lo, hi] = pair_from(p, "k");
    return check_weak_ironing(*landscape_from(p.at("landscape")), p.at("radii"), lo, hi, cfg);
  }
  if (name == "linear-ironing") {
    LinearIroningConfig cfg;
    cfg.grid_step = p.at("grid_step");
    cfg.epsilon = p.at("epsilon");
    const auto [lo, hi] = pair_from(p, "k");
    return check_linear_ironing(p.at("slope"), p.at("intercept"), profile_by_name(p.at("profile")), p.at("amplitude"),
                                p.at("radii"), lo, hi, cfg);
  }
  if (name == "sharp-minima") {
    SharpMinimaConfig cfg;
    cfg.margin = p.at("margin");
    cfg.angular_step = p.at("angular_step");
    cfg.graph_step = p.at("graph_step");
    cfg.relative = p.at("relative");
    return check_sharp_minima(p.at("sigmas"), p.at("radii"), cfg);
  }
  if (name == "open-unreachables") {
    OpenUnreachablesConfig cfg;
    cfg.angular_step = p.at("angular_step");
    cfg.graph_step = p.at("graph_step");
    return check_open_unreachables(*landscape_from(p.at("landscape")), p.at("theta0"), p.at("rho"), p.at("delta"),
                                   p.at("max_k"), cfg);
  }
  if (name == "gd-limit") {
    GdLimitConfig cfg;
    cfg.epsilon = p.at("epsilon");
    cfg.informational = p.at("informational");
    cfg.projection = projection_from_json(p.at("projection"));
    const auto f = landscape_from(p.at("landscape"));
    const auto theta0 = p.at("theta0").get<std::vector<double>>();
    return check_gd_limit(*f, start_point(theta0, f->dim()), p.at("eta"), p.at("steps"), p.at("radii"), cfg);
  }
  SmoothingConfig cfg;
  cfg.grid_step = p.at("grid_step");
  const auto [lo, hi] = pair_from(p, "interval");
  return check_smoothing(p.at("N"), p.at("radii"), lo, hi, cfg);
}

}  // namespace

int guarded_command(std::ostream& log, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const InvalidArgument& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const json::exception& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const IoError& e) {
    log << "io error: " << e.what() << '\n';
    return kExitIoError;
  } catch (const std::exception& e) {
    log << "run error: " << e.what() << '\n';
    return kExitRunError;
  }
}

int cmd_trajectory(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  const LandscapePtr f = make_landscape(cfg.landscape.id, cfg.landscape.params);
  const Trajectory tr = run_config(cfg, *f);
  emit(cfg.output, out, [&](std::ostream& os) {
    if (cfg.format == "csv") {
      write_csv(os, tr);
    } else {
      write_json(os, tr);
    }
  });
  const StepRecord& last = tr.records.back();
  log << cfg.optimizer << " on " << f->id() << ": " << tr.records.size() << " records, final loss "
      << format_double(last.loss) << ", |theta| " << format_double(last.theta.norm()) << '\n';
  if (tr.aborted) {
    log << "aborted: " << tr.error << '\n';
    return kExitRunError;
  }
  return kExitOk;
}

int cmd_sweep(const SweepConfig& cfg, std::ostream& out, std::ostream& log) {
  struct Cell {
    double rho;
    double eta;
    double metric = std::numeric_limits<double>::quiet_NaN();
    std::string error;
  };
  std::vector<Cell> cells;
  for (double rho : cfg.rho_grid()) {
    for (double eta : cfg.eta_grid(rho)) cells.push_back({rho, eta, std::numeric_limits<double>::quiet_NaN(), {}});
  }

  std::string metric_name;
  if (cfg.task == "landscape") {
    metric_name = "final_loss";
    const LandscapePtr f = make_landscape(cfg.run.landscape.id, cfg.run.landscape.params);
    start_point(cfg.run.theta0, f->dim());
    for_each_cell(cells.size(), cfg.parallelism, [&](std::size_t i) {
      Cell& c = cells[i];
      try {
        RunConfig run = cfg.run;
        if (run.optimizer == "rbo") run.rho = c.rho;
        run.eta = c.eta;
        const Trajectory tr = run_config(run, *f);
        const double loss = tr.records.back().loss;
        if (tr.aborted) {
          c.error = tr.error;
        } else if (!std::isfinite(loss)) {
          c.error = "non-finite final loss";
        } else {
          c.metric = loss;
        }
      } catch (const std::exception& e) {
        c.error = e.what();
      }
    });
  } else {
    metric_name = "val_accuracy";
    const Split data = load_split(cfg.mlp.data);
    for_each_cell(cells.size(), cfg.parallelism, [&](std::size_t i) {
      Cell& c = cells[i];
      try {
        TrainConfig t = cfg.mlp.train;
        t.rho = c.rho;
        t.eta = c.eta;
        t.epochs = cfg.epochs;
        const TrainResult r = train_mlp(cfg.mlp.mlp, data.train, data.validation, t);
        c.metric = r.rows.back().val_accuracy;
      } catch (const std::exception& e) {
        c.error = e.what();
      }
    });
  }

  std::size_t failed = 0;
  emit(cfg.output, out, [&](std::ostream& os) {
    os << "rho,eta," << metric_name << ",error\n";
    for (const Cell& c : cells) {
      os << format_double(c.rho) << ',' << format_double(c.eta) << ',' << format_double(c.metric) << ','
         << csv_field(c.error) << '\n';
      if (!c.error.empty()) ++failed;
    }
  });
  log << "sweep: " << cells.size() << " cells, " << failed << " failed\n";
  return kExitOk;
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{"weak-ironing",      "linear-ironing", "sharp-minima",
                                              "open-unreachables", "gd-limit",       "smoothing"};
  return names;
}

int cmd_verify(const std::vector<std::string>& checks, const json& config, const std::string& output,
               std::ostream& out, std::ostream& log) {
  std::vector<std::string> selected;
  for (const auto& c : checks) {
    if (c == "all") {
      selected = check_names();
      break;
    }
    check_defaults(c);
    selected.push_back(c);
  }
  if (selected.empty()) selected = check_names();
  if (!config.is_null() && !config.is_object()) throw ConfigError("verify config must be an object keyed by check name");
  if (config.is_object()) {
    for (const auto& [key, value] : config.items()) check_defaults(key);
  }

  std::vector<json> params;
  for (const auto& name : selected) {
    json p = check_defaults(name);
    if (config.is_object() && config.contains(name)) {
      const json& user = config.at(name);
      if (!user.is_object()) throw ConfigError(name + ": expected an object");
      for (const auto& [key, value] : user.items()) {
        if (!p.contains(key) && key != "sup" && key != "maximizer_distance") {
          throw ConfigError(name + ": unknown key '" + key + "'");
        }
      }
      // A custom landscape invalidates the default maximizer distance.
      if (name == "weak-ironing" && user.contains("landscape") && !user.contains("maximizer_distance")) {
        p.erase("maximizer_distance");
      }
      merge_into(p, user);
    }
    params.push_back(std::move(p));
  }

  std::vector<CheckReport> reports(selected.size());
  std::vector<std::exception_ptr> errors(selected.size());
  for_each_cell(selected.size(), 0, [&](std::size_t i) {
    try {
      reports[i] = run_check(selected[i], params[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  bool all = true;
  json doc = json::array();
  for (const auto& r : reports) {
    all = all && r.passed;
    doc.push_back(to_json(r));
    log << (r.passed ? "PASS " : (r.skipped ? "SKIP " : "FAIL ")) << r.name << '\n';
  }
  emit(output, out, [&](std::ostream& os) { os << json{{"passed", all}, {"reports", doc}}.dump(2) << '\n'; });
  return all ? kExitOk : kExitChecksFailed;
}

int cmd_train(const TrainSettings& settings, std::ostream& out, std::ostream& log) {
  const Split data = load_split(settings.data);
  log << "train: " << settings.train.optimizer << ", " << data.train->size() << " training / "
      << data.validation.size() << " validation samples\n";
  const TrainResult r = train_mlp(settings.mlp, data.train, data.validation, settings.train, [&](const EpochRow& row) {
    log << "epoch " << row.epoch << ": train loss " << row.train_loss << ", val loss " << row.val_loss
        << ", val accuracy " << row.val_accuracy << '\n';
  });
  emit(settings.output, out, [&](std::ostream& os) {
    os << "epoch,train_loss,train_accuracy,val_loss,val_accuracy\n";
    for (const auto& row : r.rows) {
      os << row.epoch << ',' << format_double(row.train_loss) << ',' << format_double(row.train_accuracy) << ','
         << format_double(row.val_loss) << ',' << format_double(row.val_accuracy) << '\n';
    }
  });
  const EpochRow& last = r.rows.back();
  log << "final validation accuracy " << last.val_accuracy << " (loss " << last.val_loss << ")\n";
  return kExitOk;
}

OffsetRequest offset_request_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("offset config: expected an object");
  const std::set<std::string> allowed{"landscape", "radii", "interval", "grid_step", "mode", "theta_step", "angular_step", "output"};
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw ConfigError("offset config: unknown key '" + key + "'");
  }
  OffsetRequest r;
  if (j.contains("landscape")) {
    r.landscape.id = j.at("landscape").at("id").get<std::string>();
    r.landscape.params = j.at("landscape").value("params", json::object());
  }
  if (j.contains("radii")) r.radii = j.at("radii").get<std::vector<double>>();
  if (j.contains("interval")) std::tie(r.lo, r.hi) = pair_from(j, "interval");
  r.grid_step = j.value("grid_step", r.grid_step);
  r.mode = j.value("mode", r.mode);
  if (r.mode != "offset" && r.mode != "unreachable") throw ConfigError("offset config: unknown mode '" + r.mode + "'");
  r.theta_step = j.value("theta_step", r.theta_step);
  r.angular_step = j.value("angular_step", r.angular_step);
  r.output = j.value("output", r.output);
  return r;
}

int cmd_offset(const OffsetRequest& req, std::ostream& out, std::ostream& log) {
  const LandscapePtr f = make_landscape(req.landscape.id, req.landscape.params);
  if (f->dim() != 1) throw ConfigError("offset needs a 1D landscape");
  if (req.radii.empty()) throw ConfigError("offset: no radius given");
  for (double rho : req.radii) {
    if (!(rho > 0.0)) throw ConfigError("offset: radii must be > 0");
  }
  if (!(req.grid_step > 0.0) || !(req.theta_step > 0.0) || !(req.angular_step > 0.0)) {
    throw ConfigError("offset: steps must be > 0");
  }
  if (!(req.lo < req.hi)) throw ConfigError("offset: interval needs lo < hi");
  if (req.mode != "offset" && req.mode != "unreachable") throw ConfigError("offset: unknown mode '" + req.mode + "'");

  std::ostringstream body;
  if (req.mode == "offset") {
    body << "theta,rho,value,grid_step\n";
    for (double rho : req.radii) {
      const double h = std::min(req.grid_step, rho / 100.0);
      for (const auto& s : offset_samples(*f, rho, req.lo, req.hi, h)) {
        body << format_double(s.theta) << ',' << format_double(s.rho) << ',' << format_double(s.phi_rho) << ','
             << format_double(s.grid_step) << '\n';
      }
    }
  } else {
    body << "theta,rho,flag,grid_step\n";
    const Index n = axis_count({req.lo, req.hi, req.theta_step});
    for (double rho : req.radii) {
      std::vector<Reachability> states(static_cast<std::size_t>(n));
      for_each_cell(states.size(), 0, [&](std::size_t i) {
        const double theta = req.lo + static_cast<double>(i) * req.theta_step;
        states[i] = unreachability(*f, theta, rho, req.angular_step, req.grid_step).state;
      });
      for (Index i = 0; i < n; ++i) {
        body << format_double(req.lo + static_cast<double>(i) * req.theta_step) << ',' << format_double(rho) << ','
             << to_string(states[static_cast<std::size_t>(i)]) << ',' << format_double(req.grid_step) << '\n';
      }
    }
  }
  emit(req.output, out, [&](std::ostream& os) { os << body.str(); });
  log << "offset: " << req.radii.size() << " radii over [" << req.lo << ", " << req.hi << "]\n";
  return kExitOk;
}

}  // namespace rbo
