#pragma once

// Executable checks of the geometric claims behind the optimizer. Each check
// returns a report whose observations carry the measured value, the bound it
// is compared against and the comparison. A report passes iff every
// non-informational observation holds.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbo/landscape.hpp"
#include "rbo/optimizer.hpp"

namespace rbo {

enum class Relation { less, less_equal, greater, greater_equal, info };

const char* to_string(Relation r);

struct Observation {
  std::string parameter;
  double measured = 0.0;
  double bound = 0.0;
  Relation relation = Relation::info;

  bool holds() const;
};

struct CheckReport {
  std::string name;
  bool passed = false;
  // Set when the check could not be decided; such a report never passes.
  bool skipped = false;
  std::vector<Observation> observations;
  std::string notes;

  // Recomputes `passed` from the observations.
  void finalize();
};

nlohmann::json to_json(const CheckReport& report);

struct WeakIroningConfig {
  double theta_step = 0.01;          // grid over K
  double grid_fraction = 1.0 / 2000;  // s-grid step = rho * grid_fraction
  double epsilon = 0.01;
  // sup f; taken from the landscape bounds when absent.
  std::optional<double> sup;
  // Distance from K to the nearest maximizer; adds e(rho) <= 2 A^2 / rho.
  std::optional<double> maximizer_distance;
};

// e(rho) = max over K of |phi_rho - rho - sup f| must be non-increasing along
// the (increasing) radii and end below epsilon.
CheckReport check_weak_ironing(const Landscape& f, const std::vector<double>& radii, double k_lo, double k_hi,
                               const WeakIroningConfig& cfg = {});

struct LinearIroningConfig {
  double grid_step = 1e-3;  // shared theta/s grid, clamped to rho/100
  double epsilon = 0.1;
};

// Hausdorff distance between the offset curves of the affine graph and the
// bumped graph over K. The asserted distance compares the bumped offset with
// the affine offset lifted by M = sup(amplitude * profile); the unshifted
// distance is reported as information.
CheckReport check_linear_ironing(double slope, double intercept, const BumpProfile& profile, double amplitude,
                                 const std::vector<double>& radii, double k_lo, double k_hi,
                                 const LinearIroningConfig& cfg = {});

struct SharpMinimaConfig {
  double margin = 0.1;
  double angular_step = 1e-3;
  double graph_step = 1e-4;
  // Radii are multiples of 1/sigma instead of absolute values.
  bool relative = false;
};

// For f = sigma theta^2 / 2 and every (sigma, rho): rho > (1 + margin)/sigma
// must be unreachable, rho < (1 - margin)/sigma must be reachable.
CheckReport check_sharp_minima(const std::vector<double>& sigmas, const std::vector<double>& radii,
                               const SharpMinimaConfig& cfg = {});

struct OpenUnreachablesConfig {
  double angular_step = 1e-3;
  double graph_step = 1e-4;
};

// All theta0 +- k delta (k = 1..max_k) must stay unreachable. Throws
// InvalidArgument when theta0 itself is not unreachable.
CheckReport check_open_unreachables(const Landscape& f, double theta0, double rho, double delta, int max_k,
                                    const OpenUnreachablesConfig& cfg = {});

struct GdLimitConfig {
  double epsilon = 1e-2;
  ProjectionConfig projection;
  // Report gaps without asserting them.
  bool informational = false;
};

// gap(rho) = max_t |theta_t^RBO - theta_t^GD| must be non-increasing along
// the (decreasing) radii and end below epsilon.
CheckReport check_gd_limit(const Landscape& f, const Vector& theta0, double eta, int steps,
                           const std::vector<double>& radii, const GdLimitConfig& cfg = {});

struct SmoothingConfig {
  double grid_step = 1e-3;  // clamped to min(radii)/100
};

// Local minima of the offset samples of the Riemann partial sum must not
// increase with rho.
CheckReport check_smoothing(int terms, const std::vector<double>& radii, double lo, double hi,
                            const SmoothingConfig& cfg = {});

}  // namespace rbo
