#include "skewlab/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

#include "skewlab/dataset_io.hpp"

namespace skewlab {

namespace {

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class ByteReader {
 public:
  ByteReader(const std::vector<std::uint8_t>& bytes, const char* what) : bytes_(bytes), what_(what) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v = (v << 8) | bytes_[pos_++];
    return v;
  }

  const std::uint8_t* take(std::size_t n) {
    need(n);
    const auto* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n)
      throw Error(ErrorCode::TruncatedFile, std::string(what_) + ": needs " + std::to_string(pos_ + n) +
                                                " bytes, file has " + std::to_string(bytes_.size()));
  }

  const std::vector<std::uint8_t>& bytes_;
  const char* what_;
  std::size_t pos_ = 0;
};

}  // namespace

RawImageSet parse_idx_bytes(const std::vector<std::uint8_t>& images, const std::vector<std::uint8_t>& labels) {
  ByteReader img(images, "image file");
  ByteReader lab(labels, "label file");

  const auto img_magic = img.u32();
  if (img_magic != kIdxImageMagic) throw Error(ErrorCode::BadMagic, "image file magic " + std::to_string(img_magic));
  const auto lab_magic = lab.u32();
  if (lab_magic != kIdxLabelMagic) throw Error(ErrorCode::BadMagic, "label file magic " + std::to_string(lab_magic));

  const auto n_img = img.u32();
  RawImageSet raw;
  raw.rows = img.u32();
  raw.cols = img.u32();
  const auto n_lab = lab.u32();
  if (n_img != n_lab)
    throw Error(ErrorCode::CountMismatch,
                std::to_string(n_img) + " images but " + std::to_string(n_lab) + " labels");

  const std::size_t pixels = static_cast<std::size_t>(raw.rows) * raw.cols;
  raw.images.reserve(n_img);
  for (std::uint32_t i = 0; i < n_img; ++i) {
    const auto* p = img.take(pixels);
    raw.images.emplace_back(p, p + pixels);
  }
  const auto* l = lab.take(n_lab);
  raw.labels.assign(l, l + n_lab);
  return raw;
}

RawImageSet parse_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path) {
  return parse_idx_bytes(read_bytes(images_path), read_bytes(labels_path));
}

InvSet binarize_labels(const RawImageSet& raw) {
  InvSet out;
  out.reserve(raw.images.size());
  for (std::size_t i = 0; i < raw.images.size(); ++i) {
    const int label = raw.labels.at(i);
    if (label < 0 || label > 9) throw Error(ErrorCode::InvalidArgument, "digit label out of range: " + std::to_string(label));
    const auto& img = raw.images[i];
    InvPoint p;
    p.x.resize(static_cast<Eigen::Index>(img.size()));
    for (std::size_t k = 0; k < img.size(); ++k) p.x(static_cast<Eigen::Index>(k)) = img[k] / 255.0;
    p.y = label <= 4 ? 1 : -1;
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

TabularData parse_csv_tabular(const std::string& text, const std::string& label_column, bool scale_to_unit) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "tabular file is empty");
  const auto header = split_row(line);
  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) throw Error(ErrorCode::ParseError, "no label column '" + label_column + "'");
  const auto label_idx = static_cast<std::size_t>(label_it - header.begin());

  TabularData out;
  for (std::size_t k = 0; k < header.size(); ++k)
    if (k != label_idx) out.feature_names.push_back(header[k]);
  const std::size_t d = out.feature_names.size();

  std::vector<std::vector<double>> rows;
  std::vector<int> ys;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_row(line);
    if (cells.size() != header.size())
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected " +
                                             std::to_string(header.size()) + " cells");
    std::vector<double> row;
    row.reserve(d);
    for (std::size_t k = 0; k < cells.size(); ++k) {
      double v = 0;
      try {
        v = parse_double(cells[k]);
      } catch (const Error&) {
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(lineno) + ": non-numeric cell '" + cells[k] + "'");
      }
      if (k == label_idx) {
        if (v == 1.0)
          ys.push_back(1);
        else if (v == -1.0 || v == 0.0)
          ys.push_back(-1);
        else
          throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": label must be 1, -1 or 0");
      } else {
        row.push_back(v);
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::ParseError, "tabular file has no data rows");

  out.ranges.assign(d, {0.0, 0.0});
  for (std::size_t k = 0; k < d; ++k) {
    double lo = rows[0][k], hi = rows[0][k];
    for (const auto& r : rows) {
      lo = std::min(lo, r[k]);
      hi = std::max(hi, r[k]);
    }
    out.ranges[k] = {lo, hi};
    if (scale_to_unit && lo == hi) out.warnings.push_back("feature '" + out.feature_names[k] + "' is constant; mapped to 0");
  }

  out.points.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    InvPoint p;
    p.x.resize(static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d; ++k) {
      double v = rows[i][k];
      if (scale_to_unit) {
        const auto [lo, hi] = out.ranges[k];
        v = lo == hi ? 0.0 : 2.0 * (v - lo) / (hi - lo) - 1.0;
      }
      p.x(static_cast<Eigen::Index>(k)) = v;
    }
    p.y = ys[i];
    out.points.push_back(std::move(p));
  }
  return out;
}

TabularData load_csv_tabular(const std::filesystem::path& path, const std::string& label_column, bool scale_to_unit) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv_tabular(ss.str(), label_column, scale_to_unit);
}

}  // namespace skewlab
