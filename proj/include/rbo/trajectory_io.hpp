#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "rbo/optimizer.hpp"

namespace rbo {

// Shortest round-trip decimal form ("nan", "inf", "-inf" for non-finite).
std::string format_double(double v);

// Header: t,theta_0..theta_{d-1},loss,center_theta_0..,center_y,grad_norm,
// projection_iters,projection_residual. One row per record, LF endings.
void write_csv(std::ostream& out, const Trajectory& tr);

nlohmann::json to_json(const Trajectory& tr);
void write_json(std::ostream& out, const Trajectory& tr);

// Writes to `path` in "csv" or "json"; throws IoError on failure.
void save_trajectory(const std::string& path, const std::string& format, const Trajectory& tr);

}  // namespace rbo
