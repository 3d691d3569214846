#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "skewlab/dynamics.hpp"
#include "skewlab/maxmargin.hpp"
#include "skewlab/skews.hpp"
#include "skewlab/taskgen.hpp"

namespace skewlab {

/// Scalar or single-level array value from the TOML subset.
struct ConfigValue {
  using Scalar = std::variant<bool, std::int64_t, double, std::string>;
  std::variant<bool, std::int64_t, double, std::string, std::vector<Scalar>> data;

  bool as_bool() const;
  std::int64_t as_int() const;
  double as_double() const;  // integers widen
  const std::string& as_string() const;
  std::vector<double> as_doubles() const;  // a scalar becomes a one-element list
  std::vector<std::int64_t> as_ints() const;
  std::vector<std::string> as_strings() const;
};

/// Tables keyed by name; top-level keys live in the "" table.
using ConfigTables = std::map<std::string, std::map<std::string, ConfigValue>>;

/// Parses the subset of TOML used by experiment files: `[table]` headers,
/// `key = value` with strings, booleans, integers, floats and arrays of those
/// (arrays may span lines), and `#` comments.
ConfigTables parse_config(const std::string& text);
ConfigTables load_config_file(const std::filesystem::path& path);

struct GeneratorConfig {
  GenSpec spec;
  // geometric
  double maj_margin = 0.1, min_margin = 2.0;
  std::size_t n_maj = 2, n_min = 2;
  // highdim
  std::size_t D = 100;
  double inv_margin = 1.0;
  // breakers
  std::string breaker = "unstable_invariant";
  bool test_split = false;
  // majority duplication applied after generation (0 = off)
  double duplicate_ratio = 0;
  // invariant-point sources for attach_spurious
  std::string inv_source = "gaussian";  // gaussian | heavy_tail | idx | tabular
  std::size_t inv_dim = 2;
  std::string idx_images, idx_labels, tabular_path, tabular_label = "label";
  std::size_t relu_dim = 0;  // 0 = raw features
};

struct MaxMarginConfig {
  FeatureMask mask = FeatureMask::Full;
  std::string targets = "default";  // default | balanced:<c>
  std::string subset = "all";       // all | maj | min
  bool bias = true;
  bool write_duals = false;
};

struct DynamicsConfig {
  DynSpec spec;
  double t_min = 0.01, t_max = 1e4;
  int per_decade = 4;
  std::string bounds = "none";  // none | skew_free | logistic
  double t0 = 1.0;
};

struct NormCurveConfig {
  std::vector<std::size_t> sizes;
  NormCurveOptions options;
};

struct SweepAxes {
  std::vector<double> p{0.9};
  std::vector<double> B{1.0};
  std::vector<std::uint64_t> seeds{0};
};

struct ExperimentConfig {
  std::string kind = "gen";
  GeneratorConfig generator;
  SolverOptions solver;
  MaxMarginConfig maxmargin;
  DynamicsConfig dynamics;
  NormCurveConfig normcurve;
  SweepAxes sweep;
  std::string dataset;  // input dataset CSV; replaces the generator when set
  std::string report_input;
  std::vector<int> criteria;  // verify: empty = all
  std::filesystem::path out = "out";
  bool emit_svg = false;
  std::size_t jobs = 1;

  void validate() const;
};

/// Applies the tables on top of the defaults. Unknown keys are an error.
ExperimentConfig experiment_from_tables(const ConfigTables& tables);

}  // namespace skewlab
