#pragma once

// Data-parallel grid kernels behind the geometry oracles.
//
// Every kernel has a plain serial `*_reference` twin that is kept for the
// tests and the benchmark. The fast versions only use exact reductions
// (min/max), so their output does not depend on the thread count.

#include <span>

#include "rbo/types.hpp"

namespace rbo::kernels {

// Max-plus envelope over a uniform grid:
//
//   out[i] = max_{k = 0..2K} samples[i + k] + weights[k],   i in [0, n)
//
// with samples.size() == n + 2K and weights.size() == 2K + 1. The reference
// scans all 2K + 1 offsets per output.
void envelope_reference(std::span<const double> samples, std::span<const double> weights,
                        std::span<double> out);

// Same envelope for a concave weight profile. The score matrix is then Monge,
// so the leftmost argmax is non-decreasing in i and a divide and conquer over
// rows needs O((n + K) log n) evaluations. Rows are split into a fixed number
// of chunks solved in parallel.
void envelope(std::span<const double> samples, std::span<const double> weights, std::span<double> out);

// The O(n K) scan of envelope_reference, parallelized over rows.
void envelope_bruteforce(std::span<const double> samples, std::span<const double> weights,
                         std::span<double> out);

// A 1D graph sampled on the uniform grid x_j = x0 + j * step.
struct GraphSamples {
  double x0 = 0.0;
  double step = 1.0;
  std::span<const double> y;
};

// For each query point (qx[q], qy[q]): the Euclidean distance to the nearest
// graph sample whose abscissa is within `window` of qx[q], or +inf when
// there is none.
void windowed_min_distance_reference(const GraphSamples& graph, std::span<const double> qx,
                                     std::span<const double> qy, double window, std::span<double> out);
void windowed_min_distance(const GraphSamples& graph, std::span<const double> qx, std::span<const double> qy,
                           double window, std::span<double> out);

// sup_{a in A} min_{b in B} |a - b| for point sets stored column-wise.
double directed_hausdorff_reference(const Matrix& A, const Matrix& B);
double directed_hausdorff(const Matrix& A, const Matrix& B);

}  // namespace rbo::kernels
