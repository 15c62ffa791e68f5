#include "rbo/optimizer.hpp"

#include <cmath>
#include <string>

#include "rbo/batching.hpp"
#include "rbo/errors.hpp"
#include "rbo/geometry.hpp"

namespace rbo {

namespace {

constexpr double kOverflowGuard = 1e12;

bool runaway(const Vector& theta) { return !theta.allFinite() || theta.norm() > kOverflowGuard; }

struct Evaluation {
  double value;
  Vector gradient;
};

Evaluation evaluate(const Landscape& f, const Vector& theta) {
  Evaluation e;
  e.value = f.value_and_gradient(theta, e.gradient);
  if (!std::isfinite(e.value) || !e.gradient.allFinite()) throw NumericalError("non-finite loss or gradient");
  return e;
}

AmbientPoint lifted_center(const Vector& theta, double value, const Vector& grad, double rho) {
  const Vector c = stack(theta, value) + rho * normal_from_gradient(grad);
  return {c.head(theta.size()), c(theta.size())};
}

StepRecord plain_record(std::int64_t t, const Vector& theta, const Evaluation& e) {
  StepRecord r;
  r.t = t;
  r.theta = theta;
  r.loss = e.value;
  r.center = {theta, e.value};
  r.grad_norm = e.gradient.norm();
  return r;
}

StepRecord ball_record(const BallState& s, const Vector& grad) {
  StepRecord r;
  r.theta = s.contact.theta;
  r.loss = s.contact.y;
  r.center = s.center;
  r.grad_norm = grad.norm();
  return r;
}

void require_steps(int steps) {
  if (steps < 1) throw InvalidArgument("number of steps must be >= 1");
}

void require_rho(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw InvalidArgument("rho must be > 0");
}

Trajectory make_trajectory(const std::string& optimizer, const Landscape& f, nlohmann::json hyper,
                           std::uint64_t seed = 0) {
  Trajectory tr;
  tr.header.optimizer = optimizer;
  tr.header.landscape = f.id();
  tr.header.hyperparameters = std::move(hyper);
  tr.header.seed = seed;
  return tr;
}

}  // namespace

nlohmann::json to_json(const ProjectionConfig& cfg) {
  return {{"gamma", cfg.gamma},
          {"gamma_rule", cfg.gamma_rule == GammaRule::fixed ? "fixed" : "gradient_scaled"},
          {"max_iters", cfg.max_iters},
          {"grad_tol", cfg.grad_tol},
          {"warm_start", cfg.warm_start == WarmStart::candidate_theta ? "candidate_theta" : "previous_contact"}};
}

void validate(const ProjectionConfig& cfg) {
  if (!(cfg.gamma > 0.0) || !std::isfinite(cfg.gamma)) throw InvalidArgument("projection: gamma must be > 0");
  if (cfg.max_iters < 1) throw InvalidArgument("projection: max_iters must be >= 1");
  if (!(cfg.grad_tol >= 0.0)) throw InvalidArgument("projection: grad_tol must be >= 0");
}

BallState lift(const Landscape& f, const Vector& theta0, double rho) {
  require_rho(rho);
  const Evaluation e = evaluate(f, theta0);
  return {{theta0, e.value}, lifted_center(theta0, e.value, e.gradient, rho), rho};
}

ProjectionResult project_footpoint(const Landscape& f, const AmbientPoint& candidate, const Vector& warm_start,
                                   const ProjectionConfig& cfg) {
  validate(cfg);
  if (!warm_start.allFinite()) throw InvalidArgument("projection: warm start must be finite");
  if (warm_start.size() != candidate.theta.size()) throw InvalidArgument("projection: dimension mismatch");

  Vector theta = warm_start;
  ProjectionResult out;
  for (int k = 0;; ++k) {
    Vector grad;
    const double value = f.value_and_gradient(theta, grad);
    if (!std::isfinite(value) || !grad.allFinite()) {
      throw ProjectionDivergence(k, "projection: non-finite loss at iteration " + std::to_string(k));
    }
    const Vector step = (theta - candidate.theta) + (value - candidate.y) * grad;
    const double residual = step.norm();
    if (residual <= cfg.grad_tol || k == cfg.max_iters) {
      out.point = {theta, value};
      out.iterations = k;
      out.residual = residual;
      out.gradient = std::move(grad);
      return out;
    }
    theta -= cfg.gamma * step;
    if (runaway(theta)) {
      throw ProjectionDivergence(k + 1, "projection diverged at iteration " + std::to_string(k + 1));
    }
  }
}

RboStep rbo_step(const Landscape& f, const BallState& state, double eta, const ProjectionConfig& cfg) {
  require_rho(state.rho);
  const Vector& theta = state.contact.theta;
  const Evaluation e = evaluate(f, theta);
  const Vector center = stack(theta, e.value) + state.rho * normal_from_gradient(e.gradient);
  const Vector candidate_vec = center - eta * tangent_from_gradient(e.gradient);
  const Index d = theta.size();
  const AmbientPoint candidate{candidate_vec.head(d), candidate_vec(d)};

  ProjectionConfig inner = cfg;
  if (cfg.gamma_rule == GammaRule::gradient_scaled) inner.gamma = cfg.gamma / (1.0 + e.gradient.squaredNorm());
  const Vector& warm = cfg.warm_start == WarmStart::previous_contact ? theta : candidate.theta;
  ProjectionResult p = project_footpoint(f, candidate, warm, inner);

  RboStep out;
  out.state.rho = state.rho;
  out.state.contact = p.point;
  out.state.center = lifted_center(p.point.theta, p.point.y, p.gradient, state.rho);
  out.record = ball_record(out.state, p.gradient);
  out.record.projection_iters = p.iterations;
  out.record.projection_residual = p.residual;
  return out;
}

Trajectory run_rbo(const Landscape& f, const Vector& theta0, double rho, double eta, int steps,
                   const ProjectionConfig& cfg) {
  require_steps(steps);
  require_rho(rho);
  validate(cfg);
  Trajectory tr = make_trajectory("rbo", f, {{"rho", rho}, {"eta", eta}, {"T", steps}, {"projection", to_json(cfg)}});
  const Evaluation e0 = evaluate(f, theta0);
  BallState state{{theta0, e0.value}, lifted_center(theta0, e0.value, e0.gradient, rho), rho};
  tr.records.push_back(ball_record(state, e0.gradient));
  for (int t = 0; t < steps; ++t) {
    try {
      RboStep s = rbo_step(f, state, eta, cfg);
      s.record.t = t + 1;
      tr.records.push_back(std::move(s.record));
      state = std::move(s.state);
    } catch (const NumericalError& err) {
      tr.aborted = true;
      tr.error = "step " + std::to_string(t + 1) + ": " + err.what();
      break;
    }
  }
  return tr;
}

Trajectory run_gd(const Landscape& f, const Vector& theta0, double eta, int steps) {
  require_steps(steps);
  Trajectory tr = make_trajectory("gd", f, {{"eta", eta}, {"T", steps}});
  Vector theta = theta0;
  try {
    Evaluation e = evaluate(f, theta);
    tr.records.push_back(plain_record(0, theta, e));
    for (int t = 0; t < steps; ++t) {
      theta -= eta * e.gradient;
      if (runaway(theta)) throw NumericalError("iterate left the overflow guard");
      e = evaluate(f, theta);
      tr.records.push_back(plain_record(t + 1, theta, e));
    }
  } catch (const NumericalError& err) {
    tr.aborted = true;
    tr.error = "step " + std::to_string(tr.records.size()) + ": " + err.what();
  }
  return tr;
}

Trajectory run_sam(const Landscape& f, const Vector& theta0, double eta, double sam_rho, int steps) {
  require_steps(steps);
  if (!(sam_rho >= 0.0)) throw InvalidArgument("sam_rho must be >= 0");
  Trajectory tr = make_trajectory("sam", f, {{"eta", eta}, {"sam_rho", sam_rho}, {"T", steps}});
  Vector theta = theta0;
  try {
    Evaluation e = evaluate(f, theta);
    tr.records.push_back(plain_record(0, theta, e));
    for (int t = 0; t < steps; ++t) {
      const double norm = e.gradient.norm();
      if (sam_rho > 0.0 && norm > 0.0) {
        const Vector ascent = theta + (sam_rho / norm) * e.gradient;
        const Vector g = f.gradient(ascent);
        if (!g.allFinite()) throw NumericalError("non-finite gradient at the ascent point");
        theta -= eta * g;
      } else {
        theta -= eta * e.gradient;
      }
      if (runaway(theta)) throw NumericalError("iterate left the overflow guard");
      e = evaluate(f, theta);
      tr.records.push_back(plain_record(t + 1, theta, e));
    }
  } catch (const NumericalError& err) {
    tr.aborted = true;
    tr.error = "step " + std::to_string(tr.records.size()) + ": " + err.what();
  }
  return tr;
}

Trajectory run_sgd(const StochasticLandscape& f, const Vector& theta0, double eta, int steps, std::uint64_t seed) {
  require_steps(steps);
  Trajectory tr = make_trajectory("sgd", f, {{"eta", eta}, {"T", steps}, {"batch_size", f.batch_size()}}, seed);
  BatchSampler sampler(f.num_samples(), f.batch_size(), seed);
  Vector theta = theta0;
  try {
    Evaluation e = evaluate(*f.view(sampler.next()), theta);
    tr.records.push_back(plain_record(0, theta, e));
    for (int t = 0; t < steps; ++t) {
      theta -= eta * e.gradient;
      if (runaway(theta)) throw NumericalError("iterate left the overflow guard");
      e = evaluate(*f.view(sampler.next()), theta);
      tr.records.push_back(plain_record(t + 1, theta, e));
    }
  } catch (const NumericalError& err) {
    tr.aborted = true;
    tr.error = "step " + std::to_string(tr.records.size()) + ": " + err.what();
  }
  return tr;
}

Trajectory run_rbo_stochastic(const StochasticLandscape& f, const Vector& theta0, double rho, double eta, int steps,
                              std::uint64_t seed, const ProjectionConfig& cfg) {
  require_steps(steps);
  require_rho(rho);
  validate(cfg);
  Trajectory tr = make_trajectory(
      "rbo", f,
      {{"rho", rho}, {"eta", eta}, {"T", steps}, {"batch_size", f.batch_size()}, {"projection", to_json(cfg)}},
      seed);
  BatchSampler sampler(f.num_samples(), f.batch_size(), seed);
  LandscapePtr batch = f.view(sampler.next());
  const Evaluation e0 = evaluate(*batch, theta0);
  BallState state{{theta0, e0.value}, lifted_center(theta0, e0.value, e0.gradient, rho), rho};
  tr.records.push_back(ball_record(state, e0.gradient));
  for (int t = 0; t < steps; ++t) {
    try {
      if (t > 0) batch = f.view(sampler.next());
      RboStep s = rbo_step(*batch, state, eta, cfg);
      s.record.t = t + 1;
      tr.records.push_back(std::move(s.record));
      state = std::move(s.state);
    } catch (const NumericalError& err) {
      tr.aborted = true;
      tr.error = "step " + std::to_string(t + 1) + ": " + err.what();
      break;
    }
  }
  return tr;
}

}  // namespace rbo
