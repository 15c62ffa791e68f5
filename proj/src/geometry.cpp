#include "rbo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "rbo/errors.hpp"
#include "rbo/kernels.hpp"

namespace rbo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_finite(const Vector& grad, const char* what) {
  if (!grad.allFinite()) throw NumericalError(std::string(what) + ": non-finite gradient");
}

void require_1d(const Landscape& f, const char* what) {
  if (f.dim() != 1) throw InvalidArgument(std::string(what) + ": requires a 1D landscape");
}

void check_offset_args(double rho, double h, const char* what) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw InvalidArgument(std::string(what) + ": rho must be > 0");
  if (!(h > 0.0)) throw InvalidArgument(std::string(what) + ": grid step must be > 0");
  if (h > rho / 100.0 * (1.0 + 1e-12)) throw InvalidArgument(std::string(what) + ": grid step must be <= rho/100");
}

// Largest usable offset index: |k h| strictly below rho.
Index offset_half_width(double rho, double h) {
  const double smax = rho * (1.0 - 1e-12);
  return static_cast<Index>(std::floor(smax / h));
}

double circle_weight(double rho, double s) {
  const double r2 = rho * rho - s * s;
  return r2 > 0.0 ? std::sqrt(r2) : 0.0;
}

std::vector<OffsetSample> package(std::span<const double> phi, double lo, double h, double rho) {
  std::vector<OffsetSample> out(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    out[i] = {lo + static_cast<double>(i) * h, phi[i], rho, h};
  }
  return out;
}

// f sampled on lo + j h for j = -K .. N - 1 + K.
std::vector<double> extended_samples(const Landscape& f, double lo, double h, Index n, Index K) {
  std::vector<double> ts(static_cast<std::size_t>(n + 2 * K));
  for (std::size_t j = 0; j < ts.size(); ++j) ts[j] = lo + static_cast<double>(static_cast<Index>(j) - K) * h;
  std::vector<double> ys(ts.size());
  f.values1d(ts, ys);
  return ys;
}

std::vector<double> offset_weights(double rho, double h, Index K) {
  std::vector<double> w(static_cast<std::size_t>(2 * K + 1));
  for (Index k = -K; k <= K; ++k) w[static_cast<std::size_t>(k + K)] = circle_weight(rho, static_cast<double>(k) * h);
  return w;
}

}  // namespace

Vector normal_from_gradient(const Vector& grad) {
  require_finite(grad, "normal");
  Vector n(grad.size() + 1);
  n.head(grad.size()) = -grad;
  n(grad.size()) = 1.0;
  return n / std::sqrt(1.0 + grad.squaredNorm());
}

Vector normal(const Landscape& f, const Vector& theta) { return normal_from_gradient(f.gradient(theta)); }

Vector tangent_from_gradient(const Vector& grad) {
  require_finite(grad, "tangent");
  Vector t(grad.size() + 1);
  t.head(grad.size()) = grad;
  t(grad.size()) = grad.squaredNorm();
  return t;
}

Vector tangent(const Landscape& f, const Vector& theta) { return tangent_from_gradient(f.gradient(theta)); }

Index axis_count(const GridAxis& axis) {
  if (!(axis.step > 0.0)) throw InvalidArgument("grid: step must be > 0");
  if (!(axis.hi >= axis.lo)) throw InvalidArgument("grid: hi must be >= lo");
  return static_cast<Index>(std::floor((axis.hi - axis.lo) / axis.step + 1e-9)) + 1;
}

double distance_to_graph(const Landscape& f, const AmbientPoint& point, const GraphGrid& grid) {
  const auto d = static_cast<std::size_t>(f.dim());
  if (grid.axes.size() != d || d < 1 || d > 2) throw InvalidArgument("distance_to_graph: grid needs one axis per parameter, d <= 2");
  if (point.theta.size() != f.dim()) throw InvalidArgument("distance_to_graph: point dimension mismatch");

  if (d == 1) {
    const GridAxis& ax = grid.axes[0];
    const Index n = axis_count(ax);
    std::vector<double> ts(static_cast<std::size_t>(n));
    for (Index j = 0; j < n; ++j) ts[static_cast<std::size_t>(j)] = ax.lo + static_cast<double>(j) * ax.step;
    std::vector<double> ys(ts.size());
    f.values1d(ts, ys);
    const double qx = point.theta(0);
    const double qy = point.y;
    double out = 0.0;
    kernels::windowed_min_distance({ax.lo, ax.step, ys}, std::span(&qx, 1), std::span(&qy, 1), kInf,
                                   std::span(&out, 1));
    return out;
  }

  const GridAxis& ax = grid.axes[0];
  const GridAxis& ay = grid.axes[1];
  const Index nx = axis_count(ax);
  const Index ny = axis_count(ay);
  double best = kInf;
#pragma omp parallel for schedule(static) reduction(min : best)
  for (Index i = 0; i < nx; ++i) {
    Vector theta(2);
    theta(0) = ax.lo + static_cast<double>(i) * ax.step;
    for (Index j = 0; j < ny; ++j) {
      theta(1) = ay.lo + static_cast<double>(j) * ay.step;
      const double dy = f.value(theta) - point.y;
      best = std::min(best, (theta - point.theta).squaredNorm() + dy * dy);
    }
  }
  return std::sqrt(best);
}

double offset_value(const Landscape& f, double rho, double theta, double h, const OffsetOptions& options) {
  require_1d(f, "offset_value");
  check_offset_args(rho, h, "offset_value");
  const Index K = offset_half_width(rho, h);
  const double smax = rho * (1.0 - 1e-12);
  auto score = [&](double s) { return f.value1d(theta + s) + circle_weight(rho, s); };

  const std::size_t n = static_cast<std::size_t>(2 * K + 1);
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = score(static_cast<double>(static_cast<Index>(i) - K) * h);
  double best = std::max(score(0.0), *std::max_element(values.begin(), values.end()));
  if (!options.refine) return best;

  // A coarse grid can rank the basins wrongly, so the best few grid-local
  // maxima are each refined by golden-section search on their cell.
  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < n; ++i) {
    const bool left = i == 0 || values[i] >= values[i - 1];
    const bool right = i + 1 == n || values[i] >= values[i + 1];
    if (left && right) peaks.push_back(i);
  }
  const std::size_t keep = std::min<std::size_t>(peaks.size(), options.refine_peaks);
  std::partial_sort(peaks.begin(), peaks.begin() + static_cast<std::ptrdiff_t>(keep), peaks.end(),
                    [&](std::size_t a, std::size_t b) { return values[a] > values[b] || (values[a] == values[b] && a < b); });
  constexpr double kInvPhi = 0.6180339887498949;
  for (std::size_t p = 0; p < keep; ++p) {
    const Index k = static_cast<Index>(peaks[p]) - K;
    double a = std::max(-smax, static_cast<double>(k - 1) * h);
    double b = std::min(smax, static_cast<double>(k + 1) * h);
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = score(x1);
    double f2 = score(x2);
    for (int it = 0; it < 80 && b - a > 1e-15 * (1.0 + rho); ++it) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + kInvPhi * (b - a);
        f2 = score(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - kInvPhi * (b - a);
        f1 = score(x1);
      }
    }
    best = std::max({best, f1, f2});
  }
  return best;
}

std::vector<OffsetSample> offset_samples(const Landscape& f, double rho, double lo, double hi, double h) {
  require_1d(f, "offset_samples");
  check_offset_args(rho, h, "offset_samples");
  const Index n = axis_count({lo, hi, h});
  Index K = offset_half_width(rho, h);

  // Offsets with sqrt(rho^2 - s^2) + sup f < rho + inf f can never win
  // against s = 0, so the window shrinks to |s| <= sqrt(D (2 rho - D)).
  if (const auto b = f.bounds()) {
    const double spread = b->upper - b->lower;
    if (spread >= 0.0 && spread < rho) {
      const double w = std::sqrt(spread * (2.0 * rho - spread));
      K = std::min(K, static_cast<Index>(std::ceil(w / h)) + 1);
    }
  }

  const auto samples = extended_samples(f, lo, h, n, K);
  const auto weights = offset_weights(rho, h, K);
  std::vector<double> phi(static_cast<std::size_t>(n));
  kernels::envelope(samples, weights, phi);
  return package(phi, lo, h, rho);
}

std::vector<OffsetSample> offset_samples_reference(const Landscape& f, double rho, double lo, double hi, double h) {
  require_1d(f, "offset_samples_reference");
  check_offset_args(rho, h, "offset_samples_reference");
  const Index n = axis_count({lo, hi, h});
  const Index K = offset_half_width(rho, h);
  const auto samples = extended_samples(f, lo, h, n, K);
  const auto weights = offset_weights(rho, h, K);
  std::vector<double> phi(static_cast<std::size_t>(n));
  kernels::envelope_reference(samples, weights, phi);
  return package(phi, lo, h, rho);
}

SphereGrid make_circle(const AmbientPoint& center, double rho, double angular_step, const Vector& axis) {
  if (center.theta.size() != 1) throw InvalidArgument("make_circle: center must lie in R^2");
  if (axis.size() != 2) throw InvalidArgument("make_circle: axis must lie in R^2");
  if (!(rho > 0.0)) throw InvalidArgument("make_circle: rho must be > 0");
  if (!(angular_step > 0.0) || angular_step > std::numbers::pi) {
    throw InvalidArgument("make_circle: angular step must be in (0, pi]");
  }
  const Vector u = axis.normalized();
  const Vector v{{-u(1), u(0)}};
  const auto m = static_cast<Index>(std::floor(std::numbers::pi / angular_step));
  SphereGrid g{center, rho, {}, angular_step};
  g.samples.reserve(static_cast<std::size_t>(2 * m + 1));
  for (Index k = -m; k <= m; ++k) {
    const double a = static_cast<double>(k) * angular_step;
    // +pi and -pi coincide.
    if (k == m && std::abs(a - std::numbers::pi) < 1e-12 && m > 0) continue;
    const Vector dir = std::cos(a) * u + std::sin(a) * v;
    g.samples.push_back({Vector::Constant(1, center.theta(0) + rho * dir(0)), center.y + rho * dir(1)});
  }
  return g;
}

const char* to_string(Reachability r) {
  switch (r) {
    case Reachability::reachable:
      return "reachable";
    case Reachability::unreachable:
      return "unreachable";
    case Reachability::indeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

UnreachabilityResult unreachability(const Landscape& f, double theta0, double rho, double angular_step,
                                    double graph_step) {
  require_1d(f, "unreachability");
  if (!(rho > 0.0)) throw InvalidArgument("unreachability: rho must be > 0");
  if (!(graph_step > 0.0)) throw InvalidArgument("unreachability: graph step must be > 0");

  const double y0 = f.value1d(theta0);
  const double slope = f.derivative1d(theta0);
  if (!std::isfinite(slope) || !std::isfinite(y0)) throw NumericalError("unreachability: non-finite landscape value");
  const double scale = std::sqrt(1.0 + slope * slope);
  const Vector nu{{-slope / scale, 1.0 / scale}};
  const SphereGrid circle = make_circle({Vector::Constant(1, theta0), y0}, rho, angular_step, nu);

  // Graph samples over theta0 +- 2 rho, anchored at theta0.
  const auto J = static_cast<Index>(std::ceil(2.0 * rho / graph_step));
  const double x0 = theta0 - static_cast<double>(J) * graph_step;
  std::vector<double> ts(static_cast<std::size_t>(2 * J + 1));
  for (std::size_t j = 0; j < ts.size(); ++j) ts[j] = x0 + static_cast<double>(j) * graph_step;
  std::vector<double> ys(ts.size());
  f.values1d(ts, ys);

  double lipschitz = 0.0;
  for (std::size_t j = 0; j + 1 < ys.size(); ++j) lipschitz = std::max(lipschitz, std::abs(ys[j + 1] - ys[j]) / graph_step);

  // Circle points in the closed epigraph.
  std::vector<double> qx;
  std::vector<double> qy;
  for (const auto& c : circle.samples) {
    const double t = c.theta(0);
    if (c.y >= f.value1d(t)) {
      qx.push_back(t);
      qy.push_back(c.y);
    }
  }

  std::vector<double> dist(qx.size());
  kernels::windowed_min_distance({x0, graph_step, ys}, qx, qy, rho, dist);
  double clearance = kInf;
  for (double d : dist) clearance = std::min(clearance, rho - std::min(d, rho));
  if (qx.empty()) clearance = 0.0;

  UnreachabilityResult r;
  r.clearance = clearance;
  r.lipschitz = lipschitz;
  r.slack = 2.0 * graph_step * (1.0 + lipschitz);
  r.samples_checked = static_cast<Index>(qx.size());
  if (clearance > r.slack) {
    r.state = Reachability::unreachable;
  } else if (clearance <= 1e-9 * rho) {
    r.state = Reachability::reachable;
  } else {
    r.state = Reachability::indeterminate;
  }
  return r;
}

bool is_unreachable(const Landscape& f, double theta0, double rho, double angular_step, double graph_step) {
  return unreachability(f, theta0, rho, angular_step, graph_step).state == Reachability::unreachable;
}

double sharpness(const Landscape& f, const Vector& theta, const SharpnessOptions& options) {
  if (auto H = f.hessian(theta)) {
    if (!H->allFinite()) throw NumericalError("sharpness: non-finite Hessian");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(*H, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
  }

  const Index d = f.dim();
  const double eps = 1e-5 * (1.0 + theta.norm());
  auto hvp = [&](const Vector& v) -> Vector {
    return (f.gradient(theta + eps * v) - f.gradient(theta - eps * v)) / (2.0 * eps);
  };
  Vector v(d);
  for (Index i = 0; i < d; ++i) v(i) = 1.0 + 0.01 * static_cast<double>(i % 97);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < options.max_iterations; ++it) {
    const Vector w = hvp(v);
    if (!w.allFinite()) throw NumericalError("sharpness: non-finite Hessian-vector product");
    const double next = w.norm();
    if (next == 0.0) return 0.0;
    v = w / next;
    if (it > 0 && std::abs(next - lambda) <= options.tolerance * std::max(1.0, next)) return next;
    lambda = next;
  }
  throw NumericalError("sharpness: power iteration did not converge in " + std::to_string(options.max_iterations) +
                       " iterations");
}

double hausdorff_distance(const Matrix& A, const Matrix& B) {
  return std::max(kernels::directed_hausdorff(A, B), kernels::directed_hausdorff(B, A));
}

double hausdorff_distance(std::span<const double> A, std::span<const double> B) {
  const Matrix a = Eigen::Map<const Matrix>(A.data(), 1, static_cast<Index>(A.size()));
  const Matrix b = Eigen::Map<const Matrix>(B.data(), 1, static_cast<Index>(B.size()));
  return hausdorff_distance(a, b);
}

Matrix curve_points(std::span<const double> thetas, std::span<const double> values) {
  if (thetas.size() != values.size()) throw InvalidArgument("curve_points: size mismatch");
  Matrix P(2, static_cast<Index>(thetas.size()));
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    P(0, static_cast<Index>(i)) = thetas[i];
    P(1, static_cast<Index>(i)) = values[i];
  }
  return P;
}

int count_local_minima(std::span<const double> samples) {
  if (samples.size() < 3) throw InvalidArgument("count_local_minima: need at least 3 samples");
  int count = 0;
  std::size_t i = 1;
  while (i + 1 < samples.size()) {
    // Extent of the plateau starting at i.
    std::size_t j = i;
    while (j + 1 < samples.size() && samples[j + 1] == samples[i]) ++j;
    if (j + 1 >= samples.size()) break;
    if (samples[i - 1] > samples[i] && samples[j + 1] > samples[i]) ++count;
    i = j + 1;
  }
  return count;
}

}  // namespace rbo
