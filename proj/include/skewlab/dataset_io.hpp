#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "skewlab/types.hpp"

namespace skewlab {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(const std::string& text);

/// Dataset CSV: header `label,sp0[,sp1...],inv0,inv1,...`, one point per row.
void write_dataset_csv(const Dataset& d, std::ostream& out);
/// `.meta` sidecar: key=value lines.
void write_dataset_meta(const Dataset& d, std::ostream& out);

/// Writes `path` and the sidecar with the same basename and a `.meta` extension.
void save_dataset(const Dataset& d, const std::filesystem::path& path);
/// Reads the CSV and, when present, the sidecar. Without a sidecar the spurious
/// scale is the largest |x_sp| and the two-valued flag is inferred.
Dataset load_dataset(const std::filesystem::path& path);

std::filesystem::path meta_path(const std::filesystem::path& csv_path);

}  // namespace skewlab
