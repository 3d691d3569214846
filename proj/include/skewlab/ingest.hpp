#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "skewlab/taskgen.hpp"

namespace skewlab {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

struct RawImageSet {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::vector<std::uint8_t>> images;  // row-major, rows * cols bytes each
  std::vector<int> labels;
};

/// IDX image + label files (big-endian headers, unsigned-byte payload).
RawImageSet parse_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path);
RawImageSet parse_idx_bytes(const std::vector<std::uint8_t>& images, const std::vector<std::uint8_t>& labels);

/// Digits 0-4 become y = +1, 5-9 become y = -1; pixels scaled to [0, 1].
InvSet binarize_labels(const RawImageSet& raw);

struct TabularData {
  InvSet points;
  std::vector<std::string> feature_names;
  std::vector<std::pair<double, double>> ranges;  // per-feature (min, max) before rescaling
  std::vector<std::string> warnings;
};

/// Numeric CSV with a header row. The label column must hold values that map to
/// +-1 (1/-1, or 1/0 with 0 read as -1). With scale_to_unit each feature is
/// mapped affinely onto [-1, 1]; constant columns become 0 with a warning.
TabularData load_csv_tabular(const std::filesystem::path& path, const std::string& label_column,
                             bool scale_to_unit);
TabularData parse_csv_tabular(const std::string& text, const std::string& label_column, bool scale_to_unit);

}  // namespace skewlab
