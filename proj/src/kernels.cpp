#include "rbo/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rbo/errors.hpp"

namespace rbo::kernels {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Row chunks for the parallel envelope. Fixed so the split never depends on
// the number of threads.
constexpr std::ptrdiff_t kEnvelopeChunks = 64;

void check_envelope_shapes(std::span<const double> samples, std::span<const double> weights,
                           std::span<double> out) {
  if (weights.empty() || weights.size() % 2 == 0) throw InvalidArgument("envelope: weights must have odd length");
  if (samples.size() != out.size() + weights.size() - 1) {
    throw InvalidArgument("envelope: samples.size() must equal out.size() + weights.size() - 1");
  }
}

struct Best {
  double value;
  std::ptrdiff_t column;
};

// Leftmost maximum of row i over columns [jlo, jhi] (clipped to the band).
inline Best row_max(std::span<const double> samples, std::span<const double> weights, std::ptrdiff_t i,
                    std::ptrdiff_t jlo, std::ptrdiff_t jhi) {
  const auto band = static_cast<std::ptrdiff_t>(weights.size()) - 1;
  const std::ptrdiff_t lo = std::max(jlo, i);
  const std::ptrdiff_t hi = std::min(jhi, i + band);
  Best best{kNegInf, lo};
  for (std::ptrdiff_t j = lo; j <= hi; ++j) {
    const double v = samples[j] + weights[j - i];
    if (v > best.value) best = {v, j};
  }
  return best;
}

void solve_rows(std::span<const double> samples, std::span<const double> weights, std::span<double> out,
                std::ptrdiff_t ilo, std::ptrdiff_t ihi, std::ptrdiff_t jlo, std::ptrdiff_t jhi) {
  // Iterative stack keeps deep recursions off the call stack for long grids.
  struct Task {
    std::ptrdiff_t ilo, ihi, jlo, jhi;
  };
  std::vector<Task> stack{{ilo, ihi, jlo, jhi}};
  while (!stack.empty()) {
    const Task t = stack.back();
    stack.pop_back();
    if (t.ilo > t.ihi) continue;
    const std::ptrdiff_t mid = t.ilo + (t.ihi - t.ilo) / 2;
    const Best b = row_max(samples, weights, mid, t.jlo, t.jhi);
    out[mid] = b.value;
    stack.push_back({t.ilo, mid - 1, t.jlo, b.column});
    stack.push_back({mid + 1, t.ihi, b.column, t.jhi});
  }
}

}  // namespace

void envelope_reference(std::span<const double> samples, std::span<const double> weights,
                        std::span<double> out) {
  check_envelope_shapes(samples, weights, out);
  const auto width = weights.size();
  for (std::size_t i = 0; i < out.size(); ++i) {
    double best = kNegInf;
    for (std::size_t k = 0; k < width; ++k) best = std::max(best, samples[i + k] + weights[k]);
    out[i] = best;
  }
}

void envelope_bruteforce(std::span<const double> samples, std::span<const double> weights,
                         std::span<double> out) {
  check_envelope_shapes(samples, weights, out);
  const auto width = static_cast<std::ptrdiff_t>(weights.size());
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double best = kNegInf;
    const double* s = samples.data() + i;
    for (std::ptrdiff_t k = 0; k < width; ++k) best = std::max(best, s[k] + weights[k]);
    out[i] = best;
  }
}

void envelope(std::span<const double> samples, std::span<const double> weights, std::span<double> out) {
  check_envelope_shapes(samples, weights, out);
  const auto n = static_cast<std::ptrdiff_t>(out.size());
  if (n == 0) return;
  const auto m = static_cast<std::ptrdiff_t>(samples.size());

  // Boundary rows are solved by full scans; chunk interiors inherit the
  // column range between their boundary argmaxes.
  std::vector<std::ptrdiff_t> rows;
  for (std::ptrdiff_t c = 0; c <= kEnvelopeChunks; ++c) rows.push_back(c * (n - 1) / kEnvelopeChunks);
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  const auto chunks = static_cast<std::ptrdiff_t>(rows.size()) - 1;
  std::vector<std::ptrdiff_t> cols(chunks + 1);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c <= chunks; ++c) {
    const Best b = row_max(samples, weights, rows[c], 0, m - 1);
    out[rows[c]] = b.value;
    cols[c] = b.column;
  }
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t c = 0; c < chunks; ++c) {
    solve_rows(samples, weights, out, rows[c] + 1, rows[c + 1] - 1, cols[c], cols[c + 1]);
  }
}

void windowed_min_distance_reference(const GraphSamples& graph, std::span<const double> qx,
                                     std::span<const double> qy, double window, std::span<double> out) {
  if (qx.size() != qy.size() || qx.size() != out.size()) throw InvalidArgument("windowed_min_distance: size mismatch");
  const auto count = static_cast<std::ptrdiff_t>(graph.y.size());
  for (std::size_t q = 0; q < qx.size(); ++q) {
    double best = kInf;
    for (std::ptrdiff_t j = 0; j < count; ++j) {
      const double dx = graph.x0 + static_cast<double>(j) * graph.step - qx[q];
      if (std::abs(dx) > window) continue;
      const double dy = graph.y[j] - qy[q];
      best = std::min(best, dx * dx + dy * dy);
    }
    out[q] = std::sqrt(best);
  }
}

void windowed_min_distance(const GraphSamples& graph, std::span<const double> qx, std::span<const double> qy,
                           double window, std::span<double> out) {
  if (qx.size() != qy.size() || qx.size() != out.size()) throw InvalidArgument("windowed_min_distance: size mismatch");
  if (!(graph.step > 0.0)) throw InvalidArgument("windowed_min_distance: step must be > 0");
  const auto count = static_cast<std::ptrdiff_t>(graph.y.size());
  const auto nq = static_cast<std::ptrdiff_t>(qx.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t q = 0; q < nq; ++q) {
    // Index range whose abscissae can fall inside the window, widened by one
    // on each side and then filtered exactly like the reference.
    const double lo_f = std::floor((qx[q] - window - graph.x0) / graph.step) - 1.0;
    const double hi_f = std::ceil((qx[q] + window - graph.x0) / graph.step) + 1.0;
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(std::max(lo_f, -1.0)));
    const std::ptrdiff_t hi =
        std::min<std::ptrdiff_t>(count - 1, static_cast<std::ptrdiff_t>(std::min(hi_f, static_cast<double>(count))));
    double best = kInf;
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      const double dx = graph.x0 + static_cast<double>(j) * graph.step - qx[q];
      if (std::abs(dx) > window) continue;
      const double dy = graph.y[j] - qy[q];
      best = std::min(best, dx * dx + dy * dy);
    }
    out[q] = std::sqrt(best);
  }
}

double directed_hausdorff_reference(const Matrix& A, const Matrix& B) {
  if (A.cols() == 0 || B.cols() == 0) throw InvalidArgument("hausdorff: empty point set");
  if (A.rows() != B.rows()) throw InvalidArgument("hausdorff: dimension mismatch");
  double worst = 0.0;
  for (Index a = 0; a < A.cols(); ++a) {
    double best = kInf;
    for (Index b = 0; b < B.cols(); ++b) best = std::min(best, (A.col(a) - B.col(b)).squaredNorm());
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

double directed_hausdorff(const Matrix& A, const Matrix& B) {
  if (A.cols() == 0 || B.cols() == 0) throw InvalidArgument("hausdorff: empty point set");
  if (A.rows() != B.rows()) throw InvalidArgument("hausdorff: dimension mismatch");
  const Index na = A.cols();
  const Index nb = B.cols();
  const Index dim = A.rows();
  double worst = 0.0;
#pragma omp parallel for schedule(static) reduction(max : worst)
  for (Index a = 0; a < na; ++a) {
    double best = kInf;
    for (Index b = 0; b < nb; ++b) {
      double d2 = 0.0;
      for (Index r = 0; r < dim; ++r) {
        const double diff = A(r, a) - B(r, b);
        d2 += diff * diff;
      }
      best = std::min(best, d2);
    }
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

}  // namespace rbo::kernels
