#include "rbo/idx.hpp"

#include <fstream>
#include <iterator>

#include "rbo/errors.hpp"

namespace rbo {

namespace {

constexpr std::uint32_t kImageMagic = 2051;
constexpr std::uint32_t kLabelMagic = 2049;

std::vector<unsigned char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(DataError::Kind::io, "cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t be32(const std::vector<unsigned char>& bytes, std::size_t offset, const std::string& path) {
  if (bytes.size() < offset + 4) throw DataError(DataError::Kind::truncated, "'" + path + "': truncated header");
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void check_magic(std::uint32_t found, std::uint32_t expected, const std::string& path) {
  if (found != expected) {
    throw DataError(DataError::Kind::wrong_magic, "'" + path + "': wrong magic " + std::to_string(found) +
                                                      " (expected " + std::to_string(expected) + ")");
  }
}

}  // namespace

Dataset Dataset::slice(Index lo, Index hi) const {
  if (lo < 0 || hi > size() || lo > hi) throw InvalidArgument("dataset slice out of range");
  Dataset out;
  out.images = images.middleRows(lo, hi - lo);
  out.labels.assign(labels.begin() + lo, labels.begin() + hi);
  return out;
}

Dataset Dataset::gather(const std::vector<Index>& rows) const {
  Dataset out;
  out.images.resize(static_cast<Index>(rows.size()), images.cols());
  out.labels.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.images.row(static_cast<Index>(i)) = images.row(rows[i]);
    out.labels[i] = labels[static_cast<std::size_t>(rows[i])];
  }
  return out;
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
  const auto img = read_file(images_path);
  check_magic(be32(img, 0, images_path), kImageMagic, images_path);
  const std::uint32_t n = be32(img, 4, images_path);
  const std::uint32_t rows = be32(img, 8, images_path);
  const std::uint32_t cols = be32(img, 12, images_path);
  const std::size_t pixels = std::size_t{rows} * cols;
  if (img.size() < 16 + std::size_t{n} * pixels) {
    throw DataError(DataError::Kind::truncated, "'" + images_path + "': truncated, expected " + std::to_string(n) +
                                                    " images of " + std::to_string(pixels) + " bytes");
  }

  const auto lab = read_file(labels_path);
  check_magic(be32(lab, 0, labels_path), kLabelMagic, labels_path);
  const std::uint32_t m = be32(lab, 4, labels_path);
  if (m != n) {
    throw DataError(DataError::Kind::count_mismatch, "count mismatch: '" + images_path + "' has " + std::to_string(n) +
                                                         " images, '" + labels_path + "' has " + std::to_string(m) +
                                                         " labels");
  }
  if (lab.size() < 8 + std::size_t{m}) throw DataError(DataError::Kind::truncated, "'" + labels_path + "': truncated");

  Dataset d;
  d.images.resize(n, static_cast<Index>(pixels));
  const unsigned char* src = img.data() + 16;
  for (std::size_t i = 0; i < std::size_t{n} * pixels; ++i) d.images.data()[i] = static_cast<float>(src[i]) / 255.0f;
  d.labels.assign(lab.begin() + 8, lab.begin() + 8 + m);
  for (auto y : d.labels) {
    if (y > 9) throw DataError(DataError::Kind::bad_label, "'" + labels_path + "': label out of range");
  }
  return d;
}

}  // namespace rbo
