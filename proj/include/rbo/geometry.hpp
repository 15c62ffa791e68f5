#pragma once

// Differential geometry of a loss graph and brute-force oracles for its
// offsets, tubular neighborhoods and unreachable points.
//
// The brute-force oracles work in d = 1 (offsets, unreachability) or
// d in {1, 2} (graph distance). Higher dimensions go through the iterative
// footpoint projection in optimizer.hpp instead.

#include <cstddef>
#include <span>
#include <vector>

#include "rbo/landscape.hpp"
#include "rbo/types.hpp"

namespace rbo {

// Upward unit normal (-grad f, 1) / sqrt(1 + |grad f|^2), in R^{d+1}.
Vector normal(const Landscape& f, const Vector& theta);
Vector normal_from_gradient(const Vector& grad);

// Tangent vector (grad f, |grad f|^2), in R^{d+1}.
Vector tangent(const Landscape& f, const Vector& theta);
Vector tangent_from_gradient(const Vector& grad);

struct GridAxis {
  double lo;
  double hi;
  double step;
};

// A uniform theta-grid with one axis per parameter (d <= 2).
struct GraphGrid {
  std::vector<GridAxis> axes;
};

// Number of nodes lo, lo + step, ... <= hi (with a 1e-9 step tolerance).
Index axis_count(const GridAxis& axis);

// min over the grid of |(theta, f(theta)) - point|.
double distance_to_graph(const Landscape& f, const AmbientPoint& point, const GraphGrid& grid);

// One sample of the upper offset function phi_rho.
struct OffsetSample {
  double theta;
  double phi_rho;
  double rho;
  double grid_step;
};

struct OffsetOptions {
  // Polish the best grid cells with a golden-section search.
  bool refine = true;
  std::size_t refine_peaks = 16;
};

// phi_rho(theta) = sup_{|s| < rho} f(theta + s) + sqrt(rho^2 - s^2), by
// brute force over s = k h. Requires a 1D landscape, rho > 0, h <= rho/100.
double offset_value(const Landscape& f, double rho, double theta, double h, const OffsetOptions& options = {});

// phi_rho on the grid theta_i = lo + i h, i = 0..N-1 (N = axis_count).
// theta and s share the grid, so f is sampled once and the sup becomes a
// max-plus envelope. When the landscape has known bounds the s-window is
// narrowed to where a sample can still beat s = 0.
std::vector<OffsetSample> offset_samples(const Landscape& f, double rho, double lo, double hi, double h);

// Serial brute force with the same grid semantics, kept for tests.
std::vector<OffsetSample> offset_samples_reference(const Landscape& f, double rho, double lo, double hi, double h);

// Points of a sphere (a circle for d = 1) around `center`.
struct SphereGrid {
  AmbientPoint center;
  double rho = 0.0;
  std::vector<AmbientPoint> samples;
  double angular_step = 0.0;
};

// Circle of radius rho around a point of R^2, with angles measured from
// `axis` (a unit vector) so that center + rho * axis is always a sample.
SphereGrid make_circle(const AmbientPoint& center, double rho, double angular_step, const Vector& axis);

enum class Reachability { reachable, unreachable, indeterminate };

const char* to_string(Reachability r);

struct UnreachabilityResult {
  Reachability state = Reachability::indeterminate;
  // min over epigraph samples c of (rho - d(c, Gamma)), clamped at 0.
  double clearance = 0.0;
  // 2 * graph_step * (1 + local Lipschitz estimate).
  double slack = 0.0;
  double lipschitz = 0.0;
  Index samples_checked = 0;
};

// Decides whether p = (theta0, f(theta0)) is rho-unreachable: every center
// of the circle S(p, rho) lying in the epigraph is strictly closer than rho
// to the graph. Borderline instances inside the grid slack come back as
// indeterminate.
UnreachabilityResult unreachability(const Landscape& f, double theta0, double rho, double angular_step,
                                    double graph_step);

bool is_unreachable(const Landscape& f, double theta0, double rho, double angular_step, double graph_step);

struct SharpnessOptions {
  int max_iterations = 200;
  double tolerance = 1e-6;
};

// Spectral norm of the Hessian at theta. Exact when the landscape has a
// Hessian oracle; otherwise power iteration on finite-difference
// Hessian-vector products.
double sharpness(const Landscape& f, const Vector& theta, const SharpnessOptions& options = {});

// Hausdorff distance between finite point sets stored column-wise.
double hausdorff_distance(const Matrix& A, const Matrix& B);
double hausdorff_distance(std::span<const double> A, std::span<const double> B);

// Points (theta_i, value_i) as a 2 x N matrix.
Matrix curve_points(std::span<const double> thetas, std::span<const double> values);

// Strict interior local minima of uniformly spaced samples. A plateau whose
// two neighbours are both higher counts once.
int count_local_minima(std::span<const double> samples);

}  // namespace rbo
