#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rbo/errors.hpp"
#include "rbo/types.hpp"

namespace rbo {

using ImageMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Images as rows of pixels in [0, 1] with their class labels.
struct Dataset {
  ImageMatrix images;
  std::vector<std::uint8_t> labels;

  Index size() const { return static_cast<Index>(labels.size()); }
  Index features() const { return images.cols(); }
  // Rows [lo, hi).
  Dataset slice(Index lo, Index hi) const;
  // Rows in the given order.
  Dataset gather(const std::vector<Index>& rows) const;
};

class DataError : public IoError {
 public:
  enum class Kind { io, wrong_magic, truncated, count_mismatch, bad_label };
  DataError(Kind kind, const std::string& what) : IoError(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// Big-endian IDX pair: images (magic 2051, dims n x rows x cols, unsigned
// bytes) and labels (magic 2049, n bytes). Pixels are scaled by 1/255.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

}  // namespace rbo
