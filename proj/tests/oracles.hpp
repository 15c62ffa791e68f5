#pragma once

// Test-side reference computations. These deliberately avoid the library's
// own geometry code so that agreement is evidence, not tautology.

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Fn = std::function<double(double)>;

inline double riemann_sum(int terms, double t) {
  long double acc = 0.0L;
  for (int n = 1; n <= terms; ++n) {
    const long double k = static_cast<long double>(n) * n;
    acc += std::sin(static_cast<long double>(k * t)) / k;
  }
  return static_cast<double>(acc);
}

// sup over a dense s-grid of f(theta + s) + sqrt(rho^2 - s^2).
inline double offset(const Fn& f, double rho, double theta, double h) {
  double best = -std::numeric_limits<double>::infinity();
  const long n = static_cast<long>(std::floor(rho / h));
  for (long k = -n; k <= n; ++k) {
    const double s = static_cast<double>(k) * h;
    best = std::max(best, f(theta + s) + std::sqrt(std::max(0.0, rho * rho - s * s)));
  }
  return best;
}

// Grid argmin of |(t, f(t)) - (cx, cy)|^2 over [lo, hi].
struct Footpoint {
  double theta;
  double dist2;
};

inline Footpoint grid_footpoint(const Fn& f, double cx, double cy, double lo, double hi, double h) {
  Footpoint best{lo, std::numeric_limits<double>::infinity()};
  const long n = static_cast<long>(std::floor((hi - lo) / h));
  for (long k = 0; k <= n; ++k) {
    const double t = lo + static_cast<double>(k) * h;
    const double dy = f(t) - cy;
    const double d2 = (t - cx) * (t - cx) + dy * dy;
    if (d2 < best.dist2) best = {t, d2};
  }
  return best;
}

inline double grid_distance(const Fn& f, double px, double py, double lo, double hi, double h) {
  return std::sqrt(grid_footpoint(f, px, py, lo, hi, h).dist2);
}

// Minimum of rho - distance(q, graph) over sampled points q of the circle of
// radius rho around (theta0, f(theta0)) that lie on or above the graph. A
// positive value means every ball of radius rho touching that graph point
// from above crosses the graph.
inline double circle_clearance(const Fn& f, double theta0, double rho, int samples, double graph_h) {
  const double cy = f(theta0);
  double clearance = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double a = 2.0 * M_PI * i / samples;
    const double px = theta0 + rho * std::cos(a);
    const double py = cy + rho * std::sin(a);
    if (py < f(px)) continue;
    const double d = grid_distance(f, px, py, px - rho, px + rho, graph_h);
    clearance = std::min(clearance, rho - d);
  }
  return clearance;
}

inline int count_strict_minima(const std::vector<double>& v) {
  // Compress plateaus, then count interior valleys.
  std::vector<double> c;
  for (double x : v) {
    if (c.empty() || x != c.back()) c.push_back(x);
  }
  int count = 0;
  for (std::size_t i = 1; i + 1 < c.size(); ++i) {
    if (c[i] < c[i - 1] && c[i] < c[i + 1]) ++count;
  }
  return count;
}

inline std::vector<double> uniform(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto& x : out) x = u(rng);
  return out;
}

}  // namespace oracle
