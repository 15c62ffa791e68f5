#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rbo/idx.hpp"
#include "rbo/mlp.hpp"
#include "rbo/optimizer.hpp"

namespace rbo {

struct TrainConfig {
  std::string optimizer = "rbo";  // rbo | sgd | sam | gd
  double rho = 1.0;
  double eta = 6.0;
  double sam_rho = 0.05;
  int epochs = 10;
  Index batch_size = 128;
  // Minibatch order; parameters are initialized from MlpSpec::seed.
  std::uint64_t seed = 1;
  // Inner solver on the network loss: a fixed small step for a few
  // iterations, since the curvature-scaled default diverges there.
  ProjectionConfig projection{0.01, GammaRule::fixed, 10, 1e-8, WarmStart::previous_contact};
};

struct EpochRow {
  int epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  std::vector<EpochRow> rows;
  Vector params;
};

// One row per finished epoch (1..epochs); epochs == 0 yields a single row
// evaluating the initial parameters. Throws NumericalError if a step fails.
TrainResult train_mlp(const MlpSpec& spec, std::shared_ptr<const Dataset> train, const Dataset& validation,
                      const TrainConfig& cfg, const std::function<void(const EpochRow&)>& on_epoch = {});

}  // namespace rbo
