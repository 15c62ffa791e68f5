#include "rbo/trajectory_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include "rbo/errors.hpp"

namespace rbo {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void write_csv(std::ostream& out, const Trajectory& tr) {
  const Index d = tr.records.empty() ? 0 : tr.records.front().theta.size();
  out << "t";
  for (Index i = 0; i < d; ++i) out << ",theta_" << i;
  out << ",loss";
  for (Index i = 0; i < d; ++i) out << ",center_theta_" << i;
  out << ",center_y,grad_norm,projection_iters,projection_residual\n";
  for (const auto& r : tr.records) {
    out << r.t;
    for (Index i = 0; i < d; ++i) out << ',' << format_double(r.theta(i));
    out << ',' << format_double(r.loss);
    for (Index i = 0; i < d; ++i) out << ',' << format_double(r.center.theta(i));
    out << ',' << format_double(r.center.y) << ',' << format_double(r.grad_norm) << ',' << r.projection_iters << ','
        << format_double(r.projection_residual) << '\n';
  }
}

nlohmann::json to_json(const Trajectory& tr) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : tr.records) {
    records.push_back({{"t", r.t},
                       {"theta", std::vector<double>(r.theta.begin(), r.theta.end())},
                       {"loss", r.loss},
                       {"center", {{"theta", std::vector<double>(r.center.theta.begin(), r.center.theta.end())},
                                   {"y", r.center.y}}},
                       {"grad_norm", r.grad_norm},
                       {"projection_iters", r.projection_iters},
                       {"projection_residual", r.projection_residual}});
  }
  nlohmann::json header = {{"optimizer", tr.header.optimizer},
                           {"landscape", tr.header.landscape},
                           {"hyperparameters", tr.header.hyperparameters},
                           {"seed", tr.header.seed},
                           {"aborted", tr.aborted}};
  if (tr.aborted) header["error"] = tr.error;
  return {{"header", header}, {"records", records}};
}

void write_json(std::ostream& out, const Trajectory& tr) { out << to_json(tr).dump(2) << '\n'; }

void save_trajectory(const std::string& path, const std::string& format, const Trajectory& tr) {
  if (format != "csv" && format != "json") throw InvalidArgument("unknown output format '" + format + "'");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  if (format == "csv") {
    write_csv(out, tr);
  } else {
    write_json(out, tr);
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace rbo
