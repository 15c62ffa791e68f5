#include "rbo/training.hpp"

#include <cmath>

#include "rbo/batching.hpp"
#include "rbo/errors.hpp"
#include "rbo/mlp_landscape.hpp"

namespace rbo {

namespace {

EpochRow measure(int epoch, const MlpSpec& spec, const Vector& params, const Dataset& train,
                 const Dataset& validation) {
  const Metrics tr = evaluate(spec, params, train);
  const Metrics va = evaluate(spec, params, validation);
  return {epoch, tr.loss, tr.accuracy, va.loss, va.accuracy};
}

}  // namespace

TrainResult train_mlp(const MlpSpec& spec, std::shared_ptr<const Dataset> train, const Dataset& validation,
                      const TrainConfig& cfg, const std::function<void(const EpochRow&)>& on_epoch) {
  const std::string& opt = cfg.optimizer;
  if (opt != "rbo" && opt != "sgd" && opt != "sam" && opt != "gd") {
    throw InvalidArgument("unknown optimizer '" + opt + "'");
  }
  if (cfg.epochs < 0) throw InvalidArgument("epochs must be >= 0");
  if (opt == "rbo" && !(cfg.rho > 0.0)) throw InvalidArgument("rho must be > 0");
  validate(cfg.projection);

  const Index batch = opt == "gd" ? train->size() : cfg.batch_size;
  const auto landscape = as_landscape(spec, train, batch);
  BatchSampler sampler(train->size(), batch, cfg.seed);

  TrainResult result;
  result.params = init_params(spec, spec.seed);
  Vector& theta = result.params;
  auto emit = [&](int epoch) {
    result.rows.push_back(measure(epoch, spec, theta, *train, validation));
    if (on_epoch) on_epoch(result.rows.back());
  };
  if (cfg.epochs == 0) {
    emit(0);
    return result;
  }

  BallState ball{{theta, 0.0}, {theta, 0.0}, cfg.rho};
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (Index step = 0; step < sampler.batches_per_epoch(); ++step) {
      const LandscapePtr f = landscape->view(sampler.next());
      if (opt == "rbo") {
        ball.contact.theta = theta;
        RboStep s = rbo_step(*f, ball, cfg.eta, cfg.projection);
        ball = std::move(s.state);
        theta = ball.contact.theta;
      } else {
        Vector grad;
        const double loss = f->value_and_gradient(theta, grad);
        if (!std::isfinite(loss)) throw NumericalError("non-finite training loss");
        const double norm = grad.norm();
        if (opt == "sam" && cfg.sam_rho > 0.0 && norm > 0.0) grad = f->gradient(theta + (cfg.sam_rho / norm) * grad);
        theta -= cfg.eta * grad;
      }
      if (!theta.allFinite()) throw NumericalError("parameters turned non-finite in epoch " + std::to_string(epoch));
    }
    emit(epoch);
  }
  return result;
}

}  // namespace rbo
