#include "skewlab/dataset_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace skewlab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw Error(ErrorCode::ParseError, "expected a boolean, got '" + v + "'");
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (first != last && *first == '+') ++first;
  double v = 0;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || t.empty())
    throw Error(ErrorCode::ParseError, "not a number: '" + text + "'");
  return v;
}

std::filesystem::path meta_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".meta");
  return p;
}

void write_dataset_csv(const Dataset& d, std::ostream& out) {
  out << "label";
  for (Eigen::Index k = 0; k < d.sp_dim(); ++k) out << ",sp" << k;
  for (Eigen::Index k = 0; k < d.inv_dim(); ++k) out << ",inv" << k;
  out << '\n';
  for (const auto& p : d.points()) {
    out << p.y;
    for (Eigen::Index k = 0; k < p.x_sp.size(); ++k) out << ',' << format_double(p.x_sp(k));
    for (Eigen::Index k = 0; k < p.x_inv.size(); ++k) out << ',' << format_double(p.x_inv(k));
    out << '\n';
  }
}

void write_dataset_meta(const Dataset& d, std::ostream& out) {
  const auto& prov = d.provenance();
  out << "generator=" << prov.generator << '\n';
  out << "seed=" << prov.seed << '\n';
  out << "sp_scale=" << format_double(d.sp_scale()) << '\n';
  out << "sp_two_valued=" << (d.sp_two_valued() ? "true" : "false") << '\n';
  out << "c2_identical_inv_marginals=" << (prov.identical_inv_marginals ? "true" : "false") << '\n';
  out << "c3_conditional_independence=" << (prov.conditional_independence ? "true" : "false") << '\n';
  out << "c5_identity_mapping=" << (prov.identity_mapping ? "true" : "false") << '\n';
  for (const auto& [k, v] : prov.extra) out << k << '=' << v << '\n';
}

void save_dataset(const Dataset& d, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream csv(path, std::ios::binary);
  if (!csv) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  write_dataset_csv(d, csv);
  std::ofstream meta(meta_path(path), std::ios::binary);
  if (!meta) throw Error(ErrorCode::Io, "cannot open " + meta_path(path).string() + " for writing");
  write_dataset_meta(d, meta);
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, path.string() + ": missing header");
  const auto header = split_commas(trim(line));
  if (header.empty() || header[0] != "label") throw Error(ErrorCode::ParseError, "header must start with 'label'");
  std::size_t n_sp = 0, n_inv = 0;
  for (std::size_t k = 1; k < header.size(); ++k) {
    if (header[k] == "sp" + std::to_string(n_sp) && n_inv == 0)
      ++n_sp;
    else if (header[k] == "inv" + std::to_string(n_inv))
      ++n_inv;
    else
      throw Error(ErrorCode::ParseError, "unexpected header column '" + header[k] + "'");
  }

  std::vector<LabeledPoint> pts;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(trim(line));
    if (cells.size() != header.size())
      throw Error(ErrorCode::ParseError, "row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                                             " cells, expected " + std::to_string(header.size()));
    const double label = parse_double(cells[0]);
    if (label != 1.0 && label != -1.0)
      throw Error(ErrorCode::ParseError, "row " + std::to_string(row) + ": label must be 1 or -1");
    Vector sp(static_cast<Eigen::Index>(n_sp)), inv(static_cast<Eigen::Index>(n_inv));
    for (std::size_t k = 0; k < n_sp; ++k) sp(static_cast<Eigen::Index>(k)) = parse_double(cells[1 + k]);
    for (std::size_t k = 0; k < n_inv; ++k) inv(static_cast<Eigen::Index>(k)) = parse_double(cells[1 + n_sp + k]);
    pts.emplace_back(std::move(inv), std::move(sp), static_cast<int>(label));
  }
  if (pts.empty()) throw Error(ErrorCode::ParseError, path.string() + ": no data rows");

  Provenance prov;
  double sp_scale = 0;
  bool have_scale = false, two_valued = false, have_two_valued = false;
  std::ifstream meta(meta_path(path), std::ios::binary);
  if (meta) {
    while (std::getline(meta, line)) {
      if (trim(line).empty() || line[0] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::ParseError, "meta line without '=': " + line);
      const std::string key = trim(line.substr(0, eq));
      const std::string value = line.substr(eq + 1);
      if (key == "generator")
        prov.generator = value;
      else if (key == "seed")
        prov.seed = std::stoull(value);
      else if (key == "sp_scale") {
        sp_scale = parse_double(value);
        have_scale = true;
      } else if (key == "sp_two_valued") {
        two_valued = parse_bool(trim(value));
        have_two_valued = true;
      } else if (key == "c2_identical_inv_marginals")
        prov.identical_inv_marginals = parse_bool(trim(value));
      else if (key == "c3_conditional_independence")
        prov.conditional_independence = parse_bool(trim(value));
      else if (key == "c5_identity_mapping")
        prov.identity_mapping = parse_bool(trim(value));
      else
        prov.set(key, value);
    }
  }
  if (!have_scale) {
    for (const auto& p : pts)
      if (p.x_sp.size() > 0) sp_scale = std::max(sp_scale, p.x_sp.cwiseAbs().maxCoeff());
    if (!(sp_scale > 0)) sp_scale = 1.0;
  }
  if (!have_two_valued) {
    two_valued = n_sp == 1;
    for (const auto& p : pts)
      if (n_sp == 1 && p.x_sp(0) != sp_scale && p.x_sp(0) != -sp_scale) two_valued = false;
  }
  return Dataset(std::move(pts), sp_scale, two_valued, std::move(prov));
}

}  // namespace skewlab
