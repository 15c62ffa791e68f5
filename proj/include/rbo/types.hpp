#pragma once

#include <Eigen/Dense>

namespace rbo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// A free point of the ambient space R^{d+1}: parameters plus a height.
struct AmbientPoint {
  Vector theta;
  double y = 0.0;
};

// A point of the graph. y == f(theta) as computed by the owning landscape.
struct GraphPoint {
  Vector theta;
  double y = 0.0;
};

// Stack (theta, y) into a single R^{d+1} vector.
inline Vector stack(const Vector& theta, double y) {
  Vector out(theta.size() + 1);
  out.head(theta.size()) = theta;
  out[theta.size()] = y;
  return out;
}

inline Vector stack(const AmbientPoint& p) { return stack(p.theta, p.y); }
inline Vector stack(const GraphPoint& p) { return stack(p.theta, p.y); }

}  // namespace rbo
