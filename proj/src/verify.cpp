#include "rbo/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rbo/errors.hpp"
#include "rbo/geometry.hpp"

namespace rbo {

namespace {

std::string label(const std::string& name, double v) {
  std::ostringstream os;
  os << name << "=" << v;
  return os.str();
}

void require_monotone(const std::vector<double>& xs, bool increasing, const char* what) {
  if (xs.empty()) throw InvalidArgument(std::string(what) + ": empty radius list");
  for (double x : xs) {
    if (!(x > 0.0)) throw InvalidArgument(std::string(what) + ": radii must be > 0");
  }
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (increasing ? !(xs[i] > xs[i - 1]) : !(xs[i] < xs[i - 1])) {
      throw InvalidArgument(std::string(what) + (increasing ? ": radii must be increasing" : ": radii must be decreasing"));
    }
  }
}

// Observations "value(i) <= value(i-1)" along a sequence, then "last < eps".
void add_trend(CheckReport& report, const std::string& metric, const std::vector<double>& radii,
               const std::vector<double>& values, std::optional<double> epsilon, Relation kind = Relation::less_equal) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    report.observations.push_back({label(metric + " rho", radii[i]), values[i], 0.0, Relation::info});
  }
  for (std::size_t i = 1; i < values.size(); ++i) {
    report.observations.push_back(
        {label(metric + " non-increasing at rho", radii[i]), values[i], values[i - 1], kind});
  }
  if (epsilon) report.observations.push_back({label(metric + " final rho", radii.back()), values.back(), *epsilon, Relation::less});
}

std::vector<double> grid(double lo, double hi, double step) {
  const Index n = axis_count({lo, hi, step});
  std::vector<double> out(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + static_cast<double>(i) * step;
  return out;
}

std::vector<double> phi_values(const std::vector<OffsetSample>& samples, double shift = 0.0) {
  std::vector<double> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) out[i] = samples[i].phi_rho + shift;
  return out;
}

std::vector<double> thetas(const std::vector<OffsetSample>& samples) {
  std::vector<double> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) out[i] = samples[i].theta;
  return out;
}

}  // namespace

const char* to_string(Relation r) {
  switch (r) {
    case Relation::less:
      return "<";
    case Relation::less_equal:
      return "<=";
    case Relation::greater:
      return ">";
    case Relation::greater_equal:
      return ">=";
    case Relation::info:
      return "info";
  }
  return "info";
}

bool Observation::holds() const {
  switch (relation) {
    case Relation::less:
      return measured < bound;
    case Relation::less_equal:
      return measured <= bound;
    case Relation::greater:
      return measured > bound;
    case Relation::greater_equal:
      return measured >= bound;
    case Relation::info:
      return true;
  }
  return false;
}

void CheckReport::finalize() {
  passed = !skipped && std::all_of(observations.begin(), observations.end(), [](const Observation& o) { return o.holds(); });
}

nlohmann::json to_json(const CheckReport& report) {
  nlohmann::json obs = nlohmann::json::array();
  for (const auto& o : report.observations) {
    nlohmann::json j = {{"parameter", o.parameter}, {"measured", o.measured}, {"relation", to_string(o.relation)}};
    if (o.relation != Relation::info) {
      j["bound"] = o.bound;
      j["holds"] = o.holds();
    }
    obs.push_back(std::move(j));
  }
  return {{"name", report.name},
          {"passed", report.passed},
          {"skipped", report.skipped},
          {"observations", obs},
          {"notes", report.notes}};
}

CheckReport check_weak_ironing(const Landscape& f, const std::vector<double>& radii, double k_lo, double k_hi,
                               const WeakIroningConfig& cfg) {
  require_monotone(radii, true, "weak ironing");
  double sup = 0.0;
  if (cfg.sup) {
    sup = *cfg.sup;
  } else if (const auto b = f.bounds(); b && b->attained) {
    sup = b->upper;
  } else {
    throw InvalidArgument("weak ironing: sup of " + f.id() + " is not known; set it in the config");
  }
  const auto ks = grid(k_lo, k_hi, cfg.theta_step);

  CheckReport report;
  report.name = "weak-ironing";
  std::vector<double> errors;
  for (double rho : radii) {
    const double h = rho * cfg.grid_fraction;
    std::vector<double> dev(ks.size());
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < ks.size(); ++i) dev[i] = std::abs(offset_value(f, rho, ks[i], h) - rho - sup);
    errors.push_back(*std::max_element(dev.begin(), dev.end()));
  }
  add_trend(report, "e", radii, errors, cfg.epsilon);
  if (cfg.maximizer_distance) {
    const double a = *cfg.maximizer_distance;
    for (std::size_t i = 0; i < radii.size(); ++i) {
      report.observations.push_back({label("e within 2A^2/rho at rho", radii[i]), errors[i], 2.0 * a * a / radii[i],
                                     Relation::less_equal});
    }
  }
  std::ostringstream notes;
  notes << "sup f = " << sup << ", K = [" << k_lo << ", " << k_hi << "], s-grid step = rho * " << cfg.grid_fraction;
  report.notes = notes.str();
  report.finalize();
  return report;
}

CheckReport check_linear_ironing(double slope, double intercept, const BumpProfile& profile, double amplitude,
                                 const std::vector<double>& radii, double k_lo, double k_hi,
                                 const LinearIroningConfig& cfg) {
  require_monotone(radii, true, "linear ironing");
  const Vector a = Vector::Constant(1, slope);
  const auto bumped = affine_plus_bump(a, intercept, profile, amplitude);
  const LandscapePtr flat = bumped->affine_part();
  const double lift = bumped->bump_sup();

  CheckReport report;
  report.name = "linear-ironing";
  std::vector<double> shifted;
  std::vector<double> raw;
  for (double rho : radii) {
    const double h = std::min(cfg.grid_step, rho / 100.0);
    const auto s_bump = offset_samples(*bumped, rho, k_lo, k_hi, h);
    const auto s_flat = offset_samples(*flat, rho, k_lo, k_hi, h);
    const auto ts = thetas(s_bump);
    const Matrix bump_curve = curve_points(ts, phi_values(s_bump));
    raw.push_back(hausdorff_distance(bump_curve, curve_points(ts, phi_values(s_flat))));
    shifted.push_back(hausdorff_distance(bump_curve, curve_points(ts, phi_values(s_flat, lift))));
  }
  add_trend(report, "shifted distance", radii, shifted, cfg.epsilon);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    report.observations.push_back({label("unshifted distance rho", radii[i]), raw[i], 0.0, Relation::info});
  }
  std::ostringstream notes;
  notes << "slope " << slope << ", profile " << profile.name << ", amplitude " << amplitude << ", lift M = " << lift
        << "; the unshifted distance tends to M, not 0";
  report.notes = notes.str();
  report.finalize();
  return report;
}

CheckReport check_sharp_minima(const std::vector<double>& sigmas, const std::vector<double>& radii,
                               const SharpMinimaConfig& cfg) {
  if (sigmas.empty() || radii.empty()) throw InvalidArgument("sharp minima: empty sigma or rho list");
  for (double s : sigmas) {
    if (!(s > 0.0)) throw InvalidArgument("sharp minima: sigma must be > 0");
  }
  for (double r : radii) {
    if (!(r > 0.0)) throw InvalidArgument("sharp minima: rho must be > 0");
  }

  CheckReport report;
  report.name = "sharp-minima";
  std::ostringstream notes;
  for (double sigma : sigmas) {
    const auto f = quadratic(Matrix::Constant(1, 1, sigma), Vector::Zero(1));
    for (double radius : radii) {
      const double rho = cfg.relative ? radius / sigma : radius;
      std::ostringstream name;
      name << "sigma=" << sigma << " rho=" << rho;
      const double threshold = 1.0 / sigma;
      const bool expect_unreachable = rho > threshold * (1.0 + cfg.margin);
      const bool expect_reachable = rho < threshold * (1.0 - cfg.margin);
      if (!expect_unreachable && !expect_reachable) {
        notes << name.str() << " within the margin of 1/sigma, not decided; ";
        continue;
      }
      const auto r = unreachability(*f, 0.0, rho, cfg.angular_step, cfg.graph_step);
      if (expect_unreachable) {
        report.observations.push_back({name.str() + " unreachable: clearance > slack", r.clearance, r.slack, Relation::greater});
      } else {
        report.observations.push_back(
            {name.str() + " reachable: clearance <= 1e-9 rho", r.clearance, 1e-9 * rho, Relation::less_equal});
      }
      if (r.state == Reachability::indeterminate) notes << name.str() << " indeterminate; ";
    }
  }
  notes << "angular step " << cfg.angular_step << ", graph step " << cfg.graph_step;
  report.notes = notes.str();
  report.finalize();
  return report;
}

CheckReport check_open_unreachables(const Landscape& f, double theta0, double rho, double delta, int max_k,
                                    const OpenUnreachablesConfig& cfg) {
  if (!(delta > 0.0) || max_k < 1) throw InvalidArgument("open unreachables: need delta > 0 and max_k >= 1");
  const auto base = unreachability(f, theta0, rho, cfg.angular_step, cfg.graph_step);
  if (base.state == Reachability::reachable) {
    throw InvalidArgument("open unreachables: base point is reachable");
  }

  CheckReport report;
  report.name = "open-unreachables";
  report.observations.push_back({label("clearance theta", theta0), base.clearance, base.slack, Relation::info});
  if (base.state == Reachability::indeterminate || base.clearance <= 2.0 * base.slack) {
    report.skipped = true;
    report.notes = "base clearance within twice the grid slack; openness not resolvable on this grid";
    report.finalize();
    return report;
  }

  std::vector<double> points;
  for (int k = 1; k <= max_k; ++k) {
    points.push_back(theta0 - k * delta);
    points.push_back(theta0 + k * delta);
  }
  std::vector<UnreachabilityResult> results(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    results[i] = unreachability(f, points[i], rho, cfg.angular_step, cfg.graph_step);
  }
  // Neighbours farther than the base clearance are reported, not asserted.
  for (std::size_t i = 0; i < points.size(); ++i) {
    const bool inside = std::abs(points[i] - theta0) <= base.clearance;
    report.observations.push_back({label("unreachable: clearance > slack at theta", points[i]), results[i].clearance,
                                   results[i].slack, inside ? Relation::greater : Relation::info});
  }
  std::ostringstream notes;
  notes << "rho " << rho << ", neighbours theta0 +- k*" << delta << " for k <= " << max_k
        << ", asserted within the base clearance " << base.clearance;
  report.notes = notes.str();
  report.finalize();
  return report;
}

CheckReport check_gd_limit(const Landscape& f, const Vector& theta0, double eta, int steps,
                           const std::vector<double>& radii, const GdLimitConfig& cfg) {
  require_monotone(radii, false, "gd limit");
  const Trajectory gd = run_gd(f, theta0, eta, steps);
  if (gd.aborted) throw NumericalError("gd limit: reference descent failed: " + gd.error);

  CheckReport report;
  report.name = "gd-limit";
  std::vector<double> gaps;
  std::ostringstream notes;
  for (double rho : radii) {
    const Trajectory rbo = run_rbo(f, theta0, rho, eta, steps, cfg.projection);
    if (rbo.aborted) {
      // NaN fails every comparison it takes part in.
      gaps.push_back(std::numeric_limits<double>::quiet_NaN());
      notes << "rho=" << rho << " aborted: " << rbo.error << "; ";
      continue;
    }
    double gap = 0.0;
    for (std::size_t t = 0; t < gd.records.size(); ++t) {
      gap = std::max(gap, (rbo.records[t].theta - gd.records[t].theta).norm());
    }
    gaps.push_back(gap);
  }
  add_trend(report, "gap", radii, gaps, cfg.epsilon);
  if (cfg.informational) {
    for (auto& o : report.observations) o.relation = Relation::info;
    notes << "informational, nothing asserted; ";
  }
  notes << "eta " << eta << ", T " << steps;
  report.notes = notes.str();
  report.finalize();
  return report;
}

CheckReport check_smoothing(int terms, const std::vector<double>& radii, double lo, double hi,
                            const SmoothingConfig& cfg) {
  require_monotone(radii, true, "smoothing");
  const auto f = riemann(terms);
  const double h = std::min(cfg.grid_step, radii.front() / 100.0);

  CheckReport report;
  report.name = "smoothing";
  const auto ts = grid(lo, hi, h);
  std::vector<double> ys(ts.size());
  f->values1d(ts, ys);
  report.observations.push_back({"minima of f", static_cast<double>(count_local_minima(ys)), 0.0, Relation::info});

  std::vector<double> counts;
  for (double rho : radii) {
    const auto samples = offset_samples(*f, rho, lo, hi, h);
    counts.push_back(static_cast<double>(count_local_minima(phi_values(samples))));
  }
  add_trend(report, "minima", radii, counts, std::nullopt);
  std::ostringstream notes;
  notes << "riemann N=" << terms << " on [" << lo << ", " << hi << "], grid step " << h;
  report.notes = notes.str();
  report.finalize();
  return report;
}

}  // namespace rbo
