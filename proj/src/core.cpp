#include "skewlab/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "skewlab/maxmargin.hpp"

namespace skewlab {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotSeparable: return "NotSeparable";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::MissingGroup: return "MissingGroup";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

LabeledPoint::LabeledPoint(Vector inv, Vector sp, int label) : x_inv(std::move(inv)), x_sp(std::move(sp)), y(label) {
  if (y != 1 && y != -1) throw Error(ErrorCode::InvalidArgument, "label must be -1 or +1, got " + std::to_string(y));
}

bool LabeledPoint::operator==(const LabeledPoint& other) const {
  return y == other.y && x_inv.size() == other.x_inv.size() && x_sp.size() == other.x_sp.size() &&
         x_inv == other.x_inv && x_sp == other.x_sp;
}

void Provenance::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : extra) {
    if (k == key) {
      v = value;
      return;
    }
  }
  extra.emplace_back(key, value);
}

const std::string* Provenance::find(const std::string& key) const {
  for (const auto& [k, v] : extra)
    if (k == key) return &v;
  return nullptr;
}

Dataset::Dataset(std::vector<LabeledPoint> points, double sp_scale, bool sp_two_valued, Provenance provenance)
    : points_(std::move(points)), sp_scale_(sp_scale), sp_two_valued_(sp_two_valued), provenance_(std::move(provenance)) {
  if (points_.empty()) throw Error(ErrorCode::InvalidArgument, "dataset must be non-empty");
  if (!(sp_scale_ > 0) || !std::isfinite(sp_scale_))
    throw Error(ErrorCode::InvalidArgument, "spurious scale must be positive and finite");
  const auto d_inv = points_.front().x_inv.size();
  const auto d_sp = points_.front().x_sp.size();
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (p.x_inv.size() != d_inv || p.x_sp.size() != d_sp)
      throw Error(ErrorCode::InvalidArgument, "inhomogeneous dimensions at point " + std::to_string(i));
    if (!p.x_inv.allFinite() || !p.x_sp.allFinite())
      throw Error(ErrorCode::InvalidArgument, "non-finite feature at point " + std::to_string(i));
  }
  if (sp_two_valued_) {
    if (d_sp != 1) throw Error(ErrorCode::InvalidArgument, "two-valued spurious block must have length 1");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const double v = points_[i].x_sp(0);
      if (v != sp_scale_ && v != -sp_scale_)
        throw Error(ErrorCode::InvalidArgument, "spurious value outside {-B, +B} at point " + std::to_string(i));
    }
  }
}

Dataset Dataset::subset(const IndexList& indices) const {
  std::vector<LabeledPoint> pts;
  pts.reserve(indices.size());
  for (auto i : indices) {
    if (i >= points_.size()) throw Error(ErrorCode::InvalidArgument, "subset index out of range");
    pts.push_back(points_[i]);
  }
  return Dataset(std::move(pts), sp_scale_, sp_two_valued_, provenance_);
}

Dataset Dataset::with_provenance(Provenance provenance) const {
  return Dataset(points_, sp_scale_, sp_two_valued_, std::move(provenance));
}

bool Dataset::operator==(const Dataset& other) const {
  return sp_scale_ == other.sp_scale_ && sp_two_valued_ == other.sp_two_valued_ && points_ == other.points_ &&
         provenance_ == other.provenance_;
}

GroupSplit split_groups(const Dataset& d) {
  if (d.sp_dim() != 1) throw Error(ErrorCode::InvalidArgument, "split_groups needs a scalar spurious feature");
  GroupSplit split;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double s = d[i].x_sp(0) * d[i].y;
    if (s > 0)
      split.majority.push_back(i);
    else if (s < 0)
      split.minority.push_back(i);
    else
      throw Error(ErrorCode::InvalidArgument, "point " + std::to_string(i) + " has x_sp = 0");
  }
  return split;
}

double empirical_p(const Dataset& d) {
  const auto split = split_groups(d);
  return static_cast<double>(split.majority.size()) / static_cast<double>(d.size());
}

Vector features(const LabeledPoint& p, FeatureMask mask) {
  if (mask == FeatureMask::InvOnly) return p.x_inv;
  Vector x(p.x_inv.size() + p.x_sp.size());
  x << p.x_inv, p.x_sp;
  return x;
}

Matrix design_matrix(const Dataset& d, FeatureMask mask) {
  const Eigen::Index cols = d.inv_dim() + (mask == FeatureMask::Full ? d.sp_dim() : 0);
  Matrix X(static_cast<Eigen::Index>(d.size()), cols);
  for (std::size_t i = 0; i < d.size(); ++i) X.row(static_cast<Eigen::Index>(i)) = features(d[i], mask).transpose();
  return X;
}

Eigen::VectorXd labels(const Dataset& d) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) y(static_cast<Eigen::Index>(i)) = d[i].y;
  return y;
}

ConstraintReport validate_easy_task(const Dataset& d) {
  ConstraintReport r;
  const auto& prov = d.provenance();

  try {
    const auto sol = solve_least_norm(MarginProblem::from(d, FeatureMask::InvOnly, true));
    const double norm = sol.model.w_inv.norm();
    r.c1.ok = sol.converged;
    r.inv_margin = norm > 0 ? 1.0 / norm : 0.0;
    std::ostringstream os;
    os << "inv-only least-norm solve " << (sol.converged ? "converged" : "did not converge") << ", ||v(S)|| = " << norm;
    r.c1.detail = os.str();
  } catch (const Error& e) {
    r.c1.ok = false;
    r.c1.detail = e.what();
  }

  r.c2 = {prov.identical_inv_marginals, "provenance flag from generator '" + prov.generator + "'"};
  r.c3 = {prov.conditional_independence, "provenance flag from generator '" + prov.generator + "'"};
  r.c5 = {prov.identity_mapping, "provenance flag from generator '" + prov.generator + "'"};

  if (d.sp_dim() != 1) {
    r.c4 = {false, "spurious block has " + std::to_string(d.sp_dim()) + " coordinates"};
  } else {
    const double B = d.sp_scale();
    std::size_t bad = 0;
    for (const auto& p : d.points())
      if (p.x_sp(0) != B && p.x_sp(0) != -B) ++bad;
    r.c4 = {bad == 0, bad == 0 ? "support within {-B, +B}" : std::to_string(bad) + " values outside {-B, +B}"};
  }
  return r;
}

}  // namespace skewlab
