#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbo/landscape.hpp"
#include "rbo/types.hpp"

namespace rbo {

// A ball of radius rho resting on the graph: center = contact + rho * normal.
struct BallState {
  GraphPoint contact;
  AmbientPoint center;
  double rho = 0.0;
};

enum class GammaRule {
  gradient_scaled,  // gamma / (1 + |grad f(theta_t)|^2)
  fixed,            // gamma as given
};

enum class WarmStart {
  previous_contact,  // theta_t
  candidate_theta,   // theta component of the candidate center
};

struct ProjectionConfig {
  double gamma = 0.1;
  GammaRule gamma_rule = GammaRule::gradient_scaled;
  int max_iters = 100;
  double grad_tol = 1e-8;
  WarmStart warm_start = WarmStart::previous_contact;

  bool operator==(const ProjectionConfig&) const = default;
};

void validate(const ProjectionConfig& cfg);
nlohmann::json to_json(const ProjectionConfig& cfg);

struct ProjectionResult {
  GraphPoint point;
  int iterations = 0;
  double residual = 0.0;  // final |grad g|
  Vector gradient;        // grad f at point.theta
};

// Contact (theta0, f(theta0)) and center lifted along the normal.
BallState lift(const Landscape& f, const Vector& theta0, double rho);

// Footpoint of `candidate` on the graph: gradient descent on
// g(theta) = |theta - theta~|^2 / 2 + (f(theta) - y~)^2 / 2 from `warm_start`
// with step cfg.gamma exactly as given (the gamma rule is resolved by the
// caller). Throws ProjectionDivergence when |theta| exceeds 1e12 or turns
// non-finite.
ProjectionResult project_footpoint(const Landscape& f, const AmbientPoint& candidate, const Vector& warm_start,
                                   const ProjectionConfig& cfg);

struct StepRecord {
  std::int64_t t = 0;
  Vector theta;
  double loss = 0.0;
  AmbientPoint center;
  double grad_norm = 0.0;
  int projection_iters = 0;
  double projection_residual = 0.0;
};

struct RboStep {
  BallState state;
  StepRecord record;  // t left at 0 for the caller to set
};

// One outer step. The ball is re-lifted at theta_t on `f` first, so a
// stochastic caller can pass the view of the current minibatch.
RboStep rbo_step(const Landscape& f, const BallState& state, double eta, const ProjectionConfig& cfg);

struct TrajectoryHeader {
  std::string optimizer;
  std::string landscape;
  nlohmann::json hyperparameters = nlohmann::json::object();
  std::uint64_t seed = 0;
};

struct Trajectory {
  TrajectoryHeader header;
  std::vector<StepRecord> records;
  // Set when a step failed; records then hold the states reached before it.
  bool aborted = false;
  std::string error;
};

// T updates, T + 1 records (record 0 is the initial state).
Trajectory run_rbo(const Landscape& f, const Vector& theta0, double rho, double eta, int steps,
                   const ProjectionConfig& cfg = {});
Trajectory run_gd(const Landscape& f, const Vector& theta0, double eta, int steps);
Trajectory run_sam(const Landscape& f, const Vector& theta0, double eta, double sam_rho, int steps);

// A fresh minibatch per outer step drawn from epoch permutations seeded by
// `seed`. SGD evaluates record t on batch t and steps with that gradient.
// Stochastic RBO keeps batch t for the whole step t (re-lift, every inner
// iteration, and record t + 1); record 0 uses batch 0.
Trajectory run_sgd(const StochasticLandscape& f, const Vector& theta0, double eta, int steps, std::uint64_t seed);
Trajectory run_rbo_stochastic(const StochasticLandscape& f, const Vector& theta0, double rho, double eta, int steps,
                              std::uint64_t seed, const ProjectionConfig& cfg = {});

}  // namespace rbo
