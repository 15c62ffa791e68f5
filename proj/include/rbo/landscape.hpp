#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbo/types.hpp"

namespace rbo {

// Known lower/upper bounds of a landscape's values. When `attained` is set,
// upper is the supremum itself.
struct Bounds {
  double lower;
  double upper;
  bool attained = false;
};

// A differentiable scalar loss f: R^d -> R with an analytic gradient.
//
// Landscapes are immutable after construction and may be shared across
// threads. The only "state" a stochastic landscape has is the minibatch it
// evaluates on, and switching minibatch produces a new view.
class Landscape {
 public:
  virtual ~Landscape() = default;

  virtual Index dim() const = 0;
  virtual double value(const Vector& theta) const = 0;
  virtual Vector gradient(const Vector& theta) const = 0;

  // f and grad f at theta in one pass. The default calls both oracles.
  virtual double value_and_gradient(const Vector& theta, Vector& grad) const;

  // Exact Hessian, when the landscape knows it.
  virtual std::optional<Matrix> hessian(const Vector& /*theta*/) const { return std::nullopt; }

  virtual std::optional<Bounds> bounds() const { return std::nullopt; }

  // Catalogue id, e.g. "riemann".
  virtual std::string id() const = 0;

  // Scalar fast paths for d == 1. The defaults wrap the vector oracles.
  virtual double value1d(double t) const;
  virtual double derivative1d(double t) const;

  // out[i] = f(ts[i]) for a 1D landscape; evaluated in parallel.
  void values1d(std::span<const double> ts, std::span<double> out) const;

 protected:
  void require_dim(const Vector& theta) const;
};

using LandscapePtr = std::shared_ptr<const Landscape>;

// Selects the minibatch a stochastic landscape evaluates on. An empty index
// list with `full == true` means the whole dataset in its stored order.
struct BatchContext {
  std::vector<Index> indices;
  bool full = true;
};

// A landscape whose value depends on a data minibatch. Evaluating the
// landscape itself uses the full dataset.
class StochasticLandscape : public Landscape {
 public:
  virtual Index num_samples() const = 0;
  virtual Index batch_size() const = 0;
  // A new immutable landscape bound to `context`.
  virtual LandscapePtr view(const BatchContext& context) const = 0;
};

// ---------------------------------------------------------------------------
// Catalogue

// f(theta) = 1/2 (theta - center)^T A (theta - center). A must be symmetric
// positive semidefinite.
LandscapePtr quadratic(const Matrix& A, const Vector& center);

// Partial sum of the Riemann function, sum_{n<=N} sin(n^2 t) / n^2.
LandscapePtr riemann(int terms);

// f(t) = sin(t).
LandscapePtr sinusoid();

// f(theta) = value.
LandscapePtr constant(Index dim, double value);

// A bounded 1D profile with derivatives and a known sup-norm.
struct BumpProfile {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::function<double(double)> second_derivative;
  double sup_norm = 0.0;  // sup |value|
  double sup = 0.0;       // sup value
  double inf = 0.0;       // inf value
};

BumpProfile sin_profile();
BumpProfile gaussian_profile();
BumpProfile profile_by_name(const std::string& name);

// How the 1D profile is applied to theta in R^d.
enum class BumpPattern {
  separable,  // sum_i phi(theta_i)
  radial,     // phi(|theta|)
};

// f(theta) = <a, theta> + b + amplitude * phi(pattern(theta)).
class AffinePlusBump : public Landscape {
 public:
  AffinePlusBump(Vector a, double b, BumpProfile profile, double amplitude,
                 BumpPattern pattern = BumpPattern::separable);

  Index dim() const override { return a_.size(); }
  double value(const Vector& theta) const override;
  Vector gradient(const Vector& theta) const override;
  std::optional<Matrix> hessian(const Vector& theta) const override;
  std::optional<Bounds> bounds() const override;
  std::string id() const override { return "affine_plus_bump"; }
  double value1d(double t) const override;
  double derivative1d(double t) const override;

  // The unperturbed affine part <a, theta> + b.
  LandscapePtr affine_part() const;
  const Vector& slope() const { return a_; }
  double intercept() const { return b_; }
  double amplitude() const { return amplitude_; }
  const BumpProfile& profile() const { return profile_; }
  // sup over theta of amplitude * phi(...) for d == 1.
  double bump_sup() const;

 private:
  Vector a_;
  double b_;
  BumpProfile profile_;
  double amplitude_;
  BumpPattern pattern_;
};

std::shared_ptr<const AffinePlusBump> affine_plus_bump(const Vector& a, double b, BumpProfile profile,
                                                       double amplitude,
                                                       BumpPattern pattern = BumpPattern::separable);

// Build a catalogue landscape from its id and a parameter object, e.g.
// ("riemann", {"N": 100}). Throws InvalidArgument naming an unknown id.
LandscapePtr make_landscape(const std::string& id, const nlohmann::json& params);

// Central differences with a uniform step h.
Vector finite_difference_grad(const Landscape& f, const Vector& theta, double h);

// Central differences with a per-coordinate step rel_h * (1 + |theta_i|).
Vector finite_difference_grad_relative(const Landscape& f, const Vector& theta, double rel_h = 1e-5);

}  // namespace rbo
