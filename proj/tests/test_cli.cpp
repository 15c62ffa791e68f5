#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "rbo/commands.hpp"
#include "rbo/config.hpp"

using namespace rbo;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("rbo-cli-" + tag + "-" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void put_be32(std::ofstream& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.put(static_cast<char>((v >> s) & 0xff));
}

// A small IDX pair whose class is visible in a block of pixels.
void write_digits(const fs::path& dir, std::uint32_t n) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> noise(0, 60);
  std::ofstream im(dir / "train-images-idx3-ubyte", std::ios::binary);
  std::ofstream lb(dir / "train-labels-idx1-ubyte", std::ios::binary);
  put_be32(im, 2051);
  put_be32(im, n);
  put_be32(im, 28);
  put_be32(im, 28);
  put_be32(lb, 2049);
  put_be32(lb, n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 10);
    lb.put(static_cast<char>(label));
    for (int p = 0; p < 784; ++p) {
      const bool on = p / 78 == label;
      im.put(static_cast<char>(on ? 200 + noise(rng) / 2 : noise(rng)));
    }
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("run config round trip") {
    RunConfig cfg;
    cfg.landscape = {"riemann", {{"N", 100}}};
    cfg.optimizer = "rbo";
    cfg.theta0 = {0.5};
    cfg.rho = 2.0;
    cfg.eta = 0.3;
    cfg.steps = 17;
    cfg.seed = 9;
    cfg.projection.gamma = 0.2;
    cfg.projection.gamma_rule = GammaRule::fixed;
    cfg.projection.warm_start = WarmStart::candidate_theta;
    cfg.output = "x.json";
    cfg.format = "json";
    CHECK(run_config_from_json(to_json(cfg)) == cfg);

    RunConfig sam;
    sam.optimizer = "sam";
    sam.sam_rho = 0.1;
    CHECK(run_config_from_json(to_json(sam)) == sam);
  }

  TEST_CASE("run config validation") {
    CHECK_THROWS_AS(run_config_from_json({{"optimizer", "gd"}, {"rho", 1.0}}), ConfigError);
    CHECK_THROWS_AS(run_config_from_json({{"optimizer", "rbo"}, {"sam_rho", 1.0}}), ConfigError);
    CHECK_THROWS_AS(run_config_from_json({{"optimizer", "adam"}}), ConfigError);
    CHECK_THROWS_AS(run_config_from_json({{"stepz", 3}}), ConfigError);
    CHECK_THROWS_AS(run_config_from_json({{"steps", "many"}}), ConfigError);
    CHECK_THROWS_AS(run_config_from_json({{"format", "xml"}}), ConfigError);
    CHECK(RunConfig{}.resolved_eta() == 6.0);
    CHECK(run_config_from_json({{"optimizer", "sgd"}}).resolved_eta() == 0.01);
  }

  TEST_CASE("flags override the file") {
    json base = {{"optimizer", "rbo"}, {"landscape", {{"id", "riemann"}, {"params", {{"N", 3}}}}}, {"steps", 5}};
    merge_into(base, {{"steps", 7}, {"landscape", {{"params", {{"N", 9}}}}}});
    const RunConfig cfg = run_config_from_json(base);
    CHECK(cfg.steps == 7);
    CHECK(cfg.landscape.id == "riemann");
    CHECK(cfg.landscape.params.at("N") == 9);
  }

  TEST_CASE("sweep config") {
    const SweepConfig s = sweep_config_from_json(json::object());
    const auto rhos = s.rho_grid();
    REQUIRE(rhos.size() == 5);
    CHECK(rhos.front() == 0.1);
    CHECK(rhos.back() == 10.0);
    CHECK(rhos[2] == doctest::Approx(1.0));
    const auto etas = s.eta_grid(2.0);
    CHECK(etas.front() == doctest::Approx(0.02));
    CHECK(etas.back() == doctest::Approx(20.0));
    CHECK(s.epochs == 3);
    CHECK_THROWS_AS(sweep_config_from_json({{"rho", {{"min", 5}, {"max", 1}}}}), ConfigError);
    CHECK_THROWS_AS(sweep_config_from_json({{"rho", {{"count", 0}}}}), ConfigError);
    CHECK_THROWS_AS(sweep_config_from_json({{"run", {{"rho", 1.0}}}}), ConfigError);
  }

  TEST_CASE("train settings fan out one seed") {
    const TrainSettings s = train_settings_from_json({{"seed", 41}, {"optimizer", "sgd"}});
    CHECK(s.mlp.seed == 41);
    CHECK(s.train.seed == 42);
    CHECK(s.train.eta == 0.01);
    CHECK(train_settings_from_json(json::object()).train.eta == 6.0);
    CHECK_THROWS_AS(train_settings_from_json({{"data", {{"train_range", {10, 5}}}}}), ConfigError);
  }

  TEST_CASE("trajectory rows") {
    std::ostringstream out, log;
    RunConfig cfg;
    cfg.landscape = {"riemann", {{"N", 100}}};
    cfg.theta0 = {1.0};
    cfg.rho = 1.0;
    cfg.eta = 0.1;
    cfg.steps = 500;
    CHECK(cmd_trajectory(cfg, out, log) == kExitOk);
    const auto rows = lines_of(out.str());
    CHECK(rows.size() == 502);
    CHECK(rows.front().rfind("t,theta_0,loss,", 0) == 0);
    CHECK(log.str().find("final loss") != std::string::npos);

    std::ostringstream gd_out;
    RunConfig gd;
    gd.landscape = {"quadratic", {{"A", {{1.0}}}}};
    gd.optimizer = "gd";
    gd.theta0 = {1.0};
    gd.eta = 0.1;
    gd.steps = 3;
    CHECK(cmd_trajectory(gd, gd_out, log) == kExitOk);
    const auto g = lines_of(gd_out.str());
    const double expected[] = {0.5, 0.405, 0.32805, 0.2657205};
    for (int t = 0; t < 4; ++t) CHECK(std::stod(split(g[static_cast<std::size_t>(t + 1)])[2]) == doctest::Approx(expected[t]));
  }

  TEST_CASE("trajectory error exit codes") {
    std::ostringstream out, log;
    const int code = guarded_command(log, [&] {
      return cmd_trajectory(run_config_from_json({{"landscape", {{"id", "wobbly"}}}}), out, log);
    });
    CHECK(code == kExitConfigError);
    CHECK(log.str().find("wobbly") != std::string::npos);

    RunConfig bad_out;
    bad_out.output = "/nonexistent-dir/t.csv";
    bad_out.landscape = {"riemann", {{"N", 3}}};
    CHECK(guarded_command(log, [&] { return cmd_trajectory(bad_out, out, log); }) == kExitIoError);

    RunConfig sgd;
    sgd.optimizer = "sgd";
    sgd.landscape = {"riemann", {{"N", 3}}};
    CHECK(guarded_command(log, [&] { return cmd_trajectory(sgd, out, log); }) == kExitConfigError);

    RunConfig diverge = run_config_from_json({{"landscape", {{"id", "quadratic"}, {"params", {{"A", {{2.0}}}}}}},
                                              {"rho", 1.0},
                                              {"eta", 5.0},
                                              {"projection", {{"gamma", 50.0}, {"gamma_rule", "fixed"}}}});
    diverge.theta0 = {3.0};
    CHECK(guarded_command(log, [&] { return cmd_trajectory(diverge, out, log); }) == kExitRunError);
  }

  TEST_CASE("sweep grid is sorted, deterministic and independent of thread count") {
    json j = {{"run", {{"landscape", {{"id", "quadratic"}, {"params", {{"A", {{1.0}}}}}}}, {"theta0", {1.0}}, {"steps", 20}}},
              {"rho", {{"min", 0.5}, {"max", 2.0}, {"count", 2}}},
              {"eta", {{"min_factor", 0.1}, {"max_factor", 1.0}, {"count", 2}}}};
    std::ostringstream one, many, log;
    j["parallelism"] = 1;
    CHECK(cmd_sweep(sweep_config_from_json(j), one, log) == kExitOk);
    j["parallelism"] = 4;
    CHECK(cmd_sweep(sweep_config_from_json(j), many, log) == kExitOk);
    CHECK(one.str() == many.str());
    const auto rows = lines_of(one.str());
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == "rho,eta,final_loss,error");
    double prev_rho = 0, prev_eta = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto cells = split(rows[i]);
      const double rho = std::stod(cells[0]);
      const double eta = std::stod(cells[1]);
      CHECK((rho > prev_rho || (rho == prev_rho && eta > prev_eta)));
      prev_rho = rho;
      prev_eta = eta;
    }
  }

  TEST_CASE("divergent sweep cell records NaN and the sweep goes on") {
    json j = {{"run", {{"optimizer", "gd"}, {"landscape", {{"id", "quadratic"}, {"params", {{"A", {{1.0}}}}}}}, {"theta0", {1.0}}, {"steps", 200}}},
              {"rho", {{"min", 0.1}, {"max", 10.0}, {"count", 2}}},
              {"eta", {{"min_factor", 0.01}, {"max_factor", 10.0}, {"count", 2}}}};
    std::ostringstream out, log;
    CHECK(cmd_sweep(sweep_config_from_json(j), out, log) == kExitOk);
    const auto rows = lines_of(out.str());
    REQUIRE(rows.size() == 5);
    const auto last = split(rows.back());
    CHECK(last[2] == "nan");
    CHECK_FALSE(last[3].empty());
    CHECK(split(rows[1])[3].empty());
  }

  TEST_CASE("verify command") {
    std::ostringstream out, log;
    CHECK(cmd_verify({"weak-ironing"}, json::object(), "", out, log) == kExitOk);
    const json report = json::parse(out.str());
    CHECK(report.at("passed") == true);
    CHECK(report.at("reports").size() == 1);

    std::ostringstream out2;
    CHECK(cmd_verify({"sharp-minima"}, {{"sharp-minima", {{"sigmas", {4.0}}}}}, "", out2, log) == kExitOk);

    CHECK(guarded_command(log, [&] { return cmd_verify({"no-such-check"}, json::object(), "", out, log); }) ==
          kExitConfigError);

    std::ostringstream out3;
    const json failing = {{"weak-ironing", {{"epsilon", 1e-9}}}};
    CHECK(cmd_verify({"weak-ironing"}, failing, "", out3, log) == kExitChecksFailed);
  }

  TEST_CASE("train command") {
    TempDir dir("train");
    write_digits(dir.path, 300);
    json j = {{"mlp", {{"layers", {784, 16, 10}}}},
              {"optimizer", "sgd"},
              {"eta", 0.1},
              {"epochs", 2},
              {"batch_size", 20},
              {"seed", 3},
              {"data", {{"dir", dir.path.string()}, {"train_range", {0, 200}}, {"val_range", {200, 300}}}},
              {"output", (dir.path / "curve.csv").string()}};
    std::ostringstream out, log;
    CHECK(cmd_train(train_settings_from_json(j), out, log) == kExitOk);
    const auto rows = lines_of(slurp(dir.path / "curve.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "epoch,train_loss,train_accuracy,val_loss,val_accuracy");
    CHECK(split(rows[2])[0] == "2");

    const std::string first = slurp(dir.path / "curve.csv");
    CHECK(cmd_train(train_settings_from_json(j), out, log) == kExitOk);
    CHECK(slurp(dir.path / "curve.csv") == first);

    j["epochs"] = 0;
    j["output"] = (dir.path / "init.csv").string();
    CHECK(cmd_train(train_settings_from_json(j), out, log) == kExitOk);
    const auto init = lines_of(slurp(dir.path / "init.csv"));
    REQUIRE(init.size() == 2);
    CHECK(std::stod(split(init[1])[3]) == doctest::Approx(std::log(10.0)).epsilon(0.2));

    j["data"]["val_range"] = {200, 5000};
    CHECK(guarded_command(log, [&] { return cmd_train(train_settings_from_json(j), out, log); }) == kExitConfigError);
    j["data"] = {{"dir", (dir.path / "missing").string()}};
    std::ostringstream err;
    CHECK(guarded_command(err, [&] { return cmd_train(train_settings_from_json(j), out, err); }) == kExitIoError);
    CHECK(err.str().find("missing") != std::string::npos);
  }

  TEST_CASE("offset command") {
    std::ostringstream out, log;
    OffsetRequest req = offset_request_from_json(
        {{"landscape", {{"id", "riemann"}, {"params", {{"N", 10}}}}}, {"radii", {0.5, 1.0}}, {"interval", {0.0, 0.1}}, {"grid_step", 0.01}});
    CHECK(cmd_offset(req, out, log) == kExitOk);
    const auto rows = lines_of(out.str());
    CHECK(rows[0] == "theta,rho,value,grid_step");
    // The step is clamped to rho / 100 for rho = 0.5.
    CHECK(rows.size() == 1 + 21 + 11);

    std::ostringstream flags;
    req.mode = "unreachable";
    req.theta_step = 0.05;
    CHECK(cmd_offset(req, flags, log) == kExitOk);
    CHECK(lines_of(flags.str())[0] == "theta,rho,flag,grid_step");
    CHECK_THROWS_AS(offset_request_from_json({{"mode", "contour"}}), ConfigError);
  }
}
