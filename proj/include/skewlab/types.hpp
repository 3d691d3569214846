#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace skewlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IndexList = std::vector<std::size_t>;

enum class ErrorCode {
  InvalidArgument,
  NotSeparable,
  BudgetExceeded,
  MissingGroup,
  NonFiniteGradient,
  BadMagic,
  TruncatedFile,
  CountMismatch,
  ParseError,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// One sample: invariant block, spurious block and a label in {-1, +1}.
struct LabeledPoint {
  Vector x_inv;
  Vector x_sp;
  int y = 1;

  LabeledPoint() = default;
  LabeledPoint(Vector inv, Vector sp, int label);

  bool operator==(const LabeledPoint& other) const;
};

/// Generator provenance. Constraints 2, 3 and 5 are properties of the sampling
/// process rather than of one finite sample, so they travel with the data.
struct Provenance {
  std::string generator = "unknown";
  std::uint64_t seed = 0;
  bool identical_inv_marginals = true;  // c2
  bool conditional_independence = true; // c3
  bool identity_mapping = true;         // c5
  // Extra key=value metadata in insertion order (realized p, multiplicities, ...).
  std::vector<std::pair<std::string, std::string>> extra;

  void set(const std::string& key, const std::string& value);
  const std::string* find(const std::string& key) const;

  bool operator==(const Provenance&) const = default;
};

/// Immutable, validated sample container.
class Dataset {
 public:
  Dataset(std::vector<LabeledPoint> points, double sp_scale, bool sp_two_valued,
          Provenance provenance = {});

  const std::vector<LabeledPoint>& points() const noexcept { return points_; }
  const LabeledPoint& operator[](std::size_t i) const { return points_[i]; }
  std::size_t size() const noexcept { return points_.size(); }
  Eigen::Index inv_dim() const noexcept { return points_.front().x_inv.size(); }
  Eigen::Index sp_dim() const noexcept { return points_.front().x_sp.size(); }
  double sp_scale() const noexcept { return sp_scale_; }
  bool sp_two_valued() const noexcept { return sp_two_valued_; }
  const Provenance& provenance() const noexcept { return provenance_; }

  /// Copy restricted to the given indices (order preserved, repeats allowed).
  Dataset subset(const IndexList& indices) const;
  Dataset with_provenance(Provenance provenance) const;

  bool operator==(const Dataset& other) const;

 private:
  std::vector<LabeledPoint> points_;
  double sp_scale_;
  bool sp_two_valued_;
  Provenance provenance_;
};

struct GroupSplit {
  IndexList majority;  // x_sp * y > 0
  IndexList minority;  // x_sp * y < 0
};

struct LinearModel {
  Vector w_inv;
  Vector w_sp;
  double bias = 0.0;

  double decision(const LabeledPoint& p) const { return w_inv.dot(p.x_inv) + w_sp.dot(p.x_sp) + bias; }
  double norm() const { return std::sqrt(w_inv.squaredNorm() + w_sp.squaredNorm()); }
};

struct ConstraintCheck {
  bool ok = false;
  std::string detail;
};

struct ConstraintReport {
  ConstraintCheck c1;  // fully predictive invariant features (inv-only separability)
  ConstraintCheck c2;  // identical invariant marginals (provenance)
  ConstraintCheck c3;  // conditional independence (provenance)
  ConstraintCheck c4;  // two-valued spurious support
  ConstraintCheck c5;  // identity mapping (provenance)
  double inv_margin = 0.0;  // 1 / ||v(S)||, 0 when inseparable

  bool all() const { return c1.ok && c2.ok && c3.ok && c4.ok && c5.ok; }
};

}  // namespace skewlab
