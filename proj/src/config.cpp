#include "skewlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "skewlab/dataset_io.hpp"

namespace skewlab {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::ParseError, msg); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '\\' && in_string) {
      ++i;
    } else if (c == '"') {
      in_string = !in_string;
    } else if (c == '#' && !in_string) {
      return line.substr(0, i);
    }
  }
  return line;
}

int bracket_depth(const std::string& s) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '\\' && in_string)
      ++i;
    else if (c == '"')
      in_string = !in_string;
    else if (!in_string && c == '[')
      ++depth;
    else if (!in_string && c == ']')
      --depth;
  }
  return depth;
}

ConfigValue::Scalar parse_scalar(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.empty()) fail("empty value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') fail("unterminated string: " + s);
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
      char c = s[i];
      if (c == '\\') {
        if (i + 2 >= s.size()) fail("dangling escape in " + s);
        const char e = s[++i];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      }
      out.push_back(c);
    }
    return out;
  }
  if (s == "true") return true;
  if (s == "false") return false;

  std::string num;
  for (char c : s)
    if (c != '_') num.push_back(c);
  const bool is_float = num.find_first_of(".eE") != std::string::npos || num == "inf" || num == "+inf" ||
                        num == "-inf" || num == "nan";
  if (!is_float) {
    std::int64_t v = 0;
    const char* first = num.data() + (num.front() == '+' ? 1 : 0);
    const auto res = std::from_chars(first, num.data() + num.size(), v);
    if (res.ec == std::errc() && res.ptr == num.data() + num.size()) return v;
    fail("cannot parse value '" + s + "'");
  }
  try {
    return parse_double(num);
  } catch (const Error&) {
    fail("cannot parse value '" + s + "'");
  }
}

std::vector<std::string> split_top_level(const std::string& body) {
  std::vector<std::string> items;
  std::string cur;
  bool in_string = false;
  for (std::size_t i = 0; i < body.size(); ++i) {
    const char c = body[i];
    if (c == '\\' && in_string && i + 1 < body.size()) {
      cur.push_back(c);
      cur.push_back(body[++i]);
      continue;
    }
    if (c == '"') in_string = !in_string;
    if (c == ',' && !in_string) {
      items.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  items.push_back(cur);
  if (!items.empty() && trim(items.back()).empty()) items.pop_back();
  return items;
}

ConfigValue parse_value(const std::string& raw) {
  const std::string s = trim(raw);
  ConfigValue v;
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') fail("unterminated array: " + s);
    const std::string body = s.substr(1, s.size() - 2);
    std::vector<ConfigValue::Scalar> items;
    for (const auto& item : split_top_level(body)) {
      if (trim(item).empty()) fail("empty array element in " + s);
      if (trim(item).front() == '[') fail("nested arrays are not supported");
      items.push_back(parse_scalar(item));
    }
    v.data = std::move(items);
    return v;
  }
  std::visit([&](auto&& x) { v.data = x; }, parse_scalar(s));
  return v;
}

std::string kind_name(const ConfigValue& v) {
  switch (v.data.index()) {
    case 0: return "boolean";
    case 1: return "integer";
    case 2: return "float";
    case 3: return "string";
    default: return "array";
  }
}

double scalar_double(const ConfigValue::Scalar& s) {
  if (const auto* i = std::get_if<std::int64_t>(&s)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&s)) return *d;
  fail("expected a number");
}

}  // namespace

bool ConfigValue::as_bool() const {
  if (const auto* b = std::get_if<bool>(&data)) return *b;
  fail("expected a boolean, got " + kind_name(*this));
}

std::int64_t ConfigValue::as_int() const {
  if (const auto* i = std::get_if<std::int64_t>(&data)) return *i;
  fail("expected an integer, got " + kind_name(*this));
}

double ConfigValue::as_double() const {
  if (const auto* i = std::get_if<std::int64_t>(&data)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&data)) return *d;
  fail("expected a number, got " + kind_name(*this));
}

const std::string& ConfigValue::as_string() const {
  if (const auto* s = std::get_if<std::string>(&data)) return *s;
  fail("expected a string, got " + kind_name(*this));
}

std::vector<double> ConfigValue::as_doubles() const {
  if (const auto* arr = std::get_if<std::vector<Scalar>>(&data)) {
    std::vector<double> out;
    for (const auto& s : *arr) out.push_back(scalar_double(s));
    return out;
  }
  return {as_double()};
}

std::vector<std::int64_t> ConfigValue::as_ints() const {
  if (const auto* arr = std::get_if<std::vector<Scalar>>(&data)) {
    std::vector<std::int64_t> out;
    for (const auto& s : *arr) {
      const auto* i = std::get_if<std::int64_t>(&s);
      if (!i) fail("expected an array of integers");
      out.push_back(*i);
    }
    return out;
  }
  return {as_int()};
}

std::vector<std::string> ConfigValue::as_strings() const {
  if (const auto* arr = std::get_if<std::vector<Scalar>>(&data)) {
    std::vector<std::string> out;
    for (const auto& s : *arr) {
      const auto* str = std::get_if<std::string>(&s);
      if (!str) fail("expected an array of strings");
      out.push_back(*str);
    }
    return out;
  }
  return {as_string()};
}

ConfigTables parse_config(const std::string& text) {
  ConfigTables tables;
  tables[""];
  std::string table;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string content = trim(strip_comment(line));
    if (content.empty()) continue;
    if (content.front() == '[') {
      if (content.back() != ']' || content.size() < 3) fail("line " + std::to_string(lineno) + ": bad table header");
      table = trim(content.substr(1, content.size() - 2));
      if (tables.count(table) && table != "") fail("line " + std::to_string(lineno) + ": duplicate table [" + table + "]");
      tables[table];
      continue;
    }
    const auto eq = content.find('=');
    if (eq == std::string::npos) fail("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(content.substr(0, eq));
    if (key.size() >= 2 && key.front() == '"' && key.back() == '"') key = key.substr(1, key.size() - 2);
    if (key.empty()) fail("line " + std::to_string(lineno) + ": empty key");
    std::string value = trim(content.substr(eq + 1));
    while (bracket_depth(value) > 0) {
      if (!std::getline(in, line)) fail("unterminated array for key '" + key + "'");
      ++lineno;
      value += ' ' + trim(strip_comment(line));
    }
    auto& t = tables[table];
    if (t.count(key)) fail("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    try {
      t[key] = parse_value(value);
    } catch (const Error& e) {
      fail("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return tables;
}

ConfigTables load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

namespace {

std::size_t to_size(std::int64_t v, const std::string& key) {
  if (v < 0) fail(key + " must be nonnegative");
  return static_cast<std::size_t>(v);
}

using Setter = std::function<void(const ConfigValue&)>;

void apply(const std::string& table, const std::map<std::string, ConfigValue>& values,
           const std::map<std::string, Setter>& setters) {
  for (const auto& [key, value] : values) {
    const auto it = setters.find(key);
    if (it == setters.end()) fail("unknown key '" + key + "' in [" + table + "]");
    try {
      it->second(value);
    } catch (const Error& e) {
      fail("[" + table + "] " + key + ": " + e.what());
    }
  }
}

FeatureMask parse_mask(const std::string& s) {
  if (s == "inv") return FeatureMask::InvOnly;
  if (s == "full") return FeatureMask::Full;
  fail("mask must be 'inv' or 'full'");
}

}  // namespace

ExperimentConfig experiment_from_tables(const ConfigTables& tables) {
  ExperimentConfig cfg;
  auto& g = cfg.generator;
  auto& dyn = cfg.dynamics;

  const std::map<std::string, std::map<std::string, Setter>> schema = {
      {"",
       {
           {"kind", [&](const ConfigValue& v) { cfg.kind = v.as_string(); }},
           {"out", [&](const ConfigValue& v) { cfg.out = v.as_string(); }},
           {"emit_svg", [&](const ConfigValue& v) { cfg.emit_svg = v.as_bool(); }},
           {"jobs", [&](const ConfigValue& v) { cfg.jobs = to_size(v.as_int(), "jobs"); }},
           {"dataset", [&](const ConfigValue& v) { cfg.dataset = v.as_string(); }},
           {"report_input", [&](const ConfigValue& v) { cfg.report_input = v.as_string(); }},
           {"criteria",
            [&](const ConfigValue& v) {
              cfg.criteria.clear();
              for (auto i : v.as_ints()) cfg.criteria.push_back(static_cast<int>(i));
            }},
       }},
      {"generator",
       {
           {"name", [&](const ConfigValue& v) { g.spec.generator = v.as_string(); }},
           {"n", [&](const ConfigValue& v) { g.spec.n = to_size(v.as_int(), "n"); }},
           {"p", [&](const ConfigValue& v) { g.spec.p = v.as_double(); }},
           {"B", [&](const ConfigValue& v) { g.spec.B = v.as_double(); }},
           {"seed", [&](const ConfigValue& v) { g.spec.seed = to_size(v.as_int(), "seed"); }},
           {"exact_counts", [&](const ConfigValue& v) { g.spec.exact_counts = v.as_bool(); }},
           {"pairing", [&](const ConfigValue& v) { g.spec.pairing = v.as_bool(); }},
           {"maj_margin", [&](const ConfigValue& v) { g.maj_margin = v.as_double(); }},
           {"min_margin", [&](const ConfigValue& v) { g.min_margin = v.as_double(); }},
           {"n_maj", [&](const ConfigValue& v) { g.n_maj = to_size(v.as_int(), "n_maj"); }},
           {"n_min", [&](const ConfigValue& v) { g.n_min = to_size(v.as_int(), "n_min"); }},
           {"D", [&](const ConfigValue& v) { g.D = to_size(v.as_int(), "D"); }},
           {"inv_margin", [&](const ConfigValue& v) { g.inv_margin = v.as_double(); }},
           {"breaker", [&](const ConfigValue& v) { g.breaker = v.as_string(); }},
           {"test_split", [&](const ConfigValue& v) { g.test_split = v.as_bool(); }},
           {"duplicate_ratio", [&](const ConfigValue& v) { g.duplicate_ratio = v.as_double(); }},
           {"inv_source", [&](const ConfigValue& v) { g.inv_source = v.as_string(); }},
           {"inv_dim", [&](const ConfigValue& v) { g.inv_dim = to_size(v.as_int(), "inv_dim"); }},
           {"idx_images", [&](const ConfigValue& v) { g.idx_images = v.as_string(); }},
           {"idx_labels", [&](const ConfigValue& v) { g.idx_labels = v.as_string(); }},
           {"tabular_path", [&](const ConfigValue& v) { g.tabular_path = v.as_string(); }},
           {"tabular_label", [&](const ConfigValue& v) { g.tabular_label = v.as_string(); }},
           {"relu_dim", [&](const ConfigValue& v) { g.relu_dim = to_size(v.as_int(), "relu_dim"); }},
       }},
      {"solver",
       {
           {"tol", [&](const ConfigValue& v) { cfg.solver.tol = v.as_double(); }},
           {"max_iter", [&](const ConfigValue& v) { cfg.solver.max_iter = to_size(v.as_int(), "max_iter"); }},
           {"divergence_cap", [&](const ConfigValue& v) { cfg.solver.divergence_cap = v.as_double(); }},
       }},
      {"maxmargin",
       {
           {"mask", [&](const ConfigValue& v) { cfg.maxmargin.mask = parse_mask(v.as_string()); }},
           {"targets", [&](const ConfigValue& v) { cfg.maxmargin.targets = v.as_string(); }},
           {"subset", [&](const ConfigValue& v) { cfg.maxmargin.subset = v.as_string(); }},
           {"bias", [&](const ConfigValue& v) { cfg.maxmargin.bias = v.as_bool(); }},
           {"write_duals", [&](const ConfigValue& v) { cfg.maxmargin.write_duals = v.as_bool(); }},
       }},
      {"dynamics",
       {
           {"loss", [&](const ConfigValue& v) { dyn.spec.loss = parse_loss(v.as_string()); }},
           {"mode", [&](const ConfigValue& v) { dyn.spec.mode = parse_dyn_mode(v.as_string()); }},
           {"lr", [&](const ConfigValue& v) { dyn.spec.lr = v.as_double(); }},
           {"weight_decay", [&](const ConfigValue& v) { dyn.spec.weight_decay = v.as_double(); }},
           {"batch_size", [&](const ConfigValue& v) { dyn.spec.batch_size = to_size(v.as_int(), "batch_size"); }},
           {"batch_seed", [&](const ConfigValue& v) { dyn.spec.batch_seed = to_size(v.as_int(), "batch_seed"); }},
           {"checkpoints", [&](const ConfigValue& v) { dyn.spec.checkpoints = v.as_doubles(); }},
           {"rel_tol", [&](const ConfigValue& v) { dyn.spec.rel_tol = v.as_double(); }},
           {"compute_residual", [&](const ConfigValue& v) { dyn.spec.compute_residual = v.as_bool(); }},
           {"t_min", [&](const ConfigValue& v) { dyn.t_min = v.as_double(); }},
           {"t_max", [&](const ConfigValue& v) { dyn.t_max = v.as_double(); }},
           {"per_decade", [&](const ConfigValue& v) { dyn.per_decade = static_cast<int>(v.as_int()); }},
           {"bounds", [&](const ConfigValue& v) { dyn.bounds = v.as_string(); }},
           {"t0", [&](const ConfigValue& v) { dyn.t0 = v.as_double(); }},
       }},
      {"normcurve",
       {
           {"sizes",
            [&](const ConfigValue& v) {
              cfg.normcurve.sizes.clear();
              for (auto s : v.as_ints()) cfg.normcurve.sizes.push_back(to_size(s, "sizes"));
            }},
           {"resample", [&](const ConfigValue& v) { cfg.normcurve.options.resample = v.as_bool(); }},
           {"seed", [&](const ConfigValue& v) { cfg.normcurve.options.seed = to_size(v.as_int(), "seed"); }},
           {"with_tilde", [&](const ConfigValue& v) { cfg.normcurve.options.with_tilde = v.as_bool(); }},
       }},
      {"sweep",
       {
           {"p", [&](const ConfigValue& v) { cfg.sweep.p = v.as_doubles(); }},
           {"B", [&](const ConfigValue& v) { cfg.sweep.B = v.as_doubles(); }},
           {"seeds",
            [&](const ConfigValue& v) {
              cfg.sweep.seeds.clear();
              for (auto s : v.as_ints()) cfg.sweep.seeds.push_back(to_size(s, "seeds"));
            }},
       }},
  };

  for (const auto& [name, values] : tables) {
    const auto it = schema.find(name);
    if (it == schema.end()) fail("unknown table [" + name + "]");
    apply(name, values, it->second);
  }
  // a generator p/B/seed without a sweep table acts as a one-point sweep
  if (!tables.count("sweep") || !tables.at("sweep").count("p")) cfg.sweep.p = {g.spec.p};
  if (!tables.count("sweep") || !tables.at("sweep").count("B")) cfg.sweep.B = {g.spec.B};
  if (!tables.count("sweep") || !tables.at("sweep").count("seeds")) cfg.sweep.seeds = {g.spec.seed};
  return cfg;
}

void ExperimentConfig::validate() const {
  static const std::vector<std::string> kinds = {"gen",      "maxmargin", "skews", "normcurve",
                                                 "dynamics", "verify",    "report"};
  if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
    throw Error(ErrorCode::InvalidArgument, "unknown experiment kind '" + kind + "'");
  if (sweep.p.empty() || sweep.B.empty() || sweep.seeds.empty())
    throw Error(ErrorCode::InvalidArgument, "sweep axes must be non-empty");
  if (jobs == 0) throw Error(ErrorCode::InvalidArgument, "jobs must be at least 1");
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "output directory must be set");
  if (maxmargin.subset != "all" && maxmargin.subset != "maj" && maxmargin.subset != "min")
    throw Error(ErrorCode::InvalidArgument, "subset must be all, maj or min");
  if (maxmargin.targets != "default" && maxmargin.targets.rfind("balanced:", 0) != 0)
    throw Error(ErrorCode::InvalidArgument, "targets must be 'default' or 'balanced:<c>'");
  if (dynamics.bounds != "none" && dynamics.bounds != "skew_free" && dynamics.bounds != "logistic")
    throw Error(ErrorCode::InvalidArgument, "bounds must be none, skew_free or logistic");
  if (kind == "normcurve" && normcurve.sizes.empty())
    throw Error(ErrorCode::InvalidArgument, "normcurve needs a non-empty sizes list");
}

}  // namespace skewlab
