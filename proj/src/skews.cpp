#include "skewlab/skews.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "skewlab/dataset_io.hpp"

namespace skewlab {

bool SkewReport::bounds_hold(double slop) const {
  if (missing_group) return false;
  bool ok = true;
  if (lb_precondition_met) ok = ok && measured_Bwsp >= lower_bound - slop;
  if (ub_precondition_met) ok = ok && std::abs(measured_Bwsp) <= upper_bound + slop;
  return ok;
}

SkewReport compute_skew_report(const Dataset& d, const SolverOptions& opts) {
  if (!d.sp_two_valued()) throw Error(ErrorCode::InvalidArgument, "skew report needs a two-valued spurious feature");
  SkewReport r;
  r.B = d.sp_scale();
  const auto groups = split_groups(d);
  if (groups.majority.empty() || groups.minority.empty()) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    r.missing_group = true;
    r.kappa1 = r.kappa2 = r.kappa1_tilde = r.kappa2_tilde = nan;
    r.c1 = r.c2 = r.lower_bound = r.upper_bound = nan;
    r.slack_lower = r.slack_upper = nan;
    r.v_min = r.v_maj = r.vt_min = r.vt_maj = nan;
    IndexList all(d.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    r.v_all = v_norm(d, all, opts);
    r.vt_all = r.v_all;
    r.measured_Bwsp = r.B * max_margin(d, true, opts).model.w_sp(0);
    return r;
  }

  IndexList all(d.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  r.v_all = v_norm(d, all, opts);
  r.v_maj = v_norm(d, groups.majority, opts);
  r.v_min = v_norm(d, groups.minority, opts);
  r.vt_all = r.v_all;  // no complement, so the zero-margin rows are absent
  r.vt_maj = v_tilde_norm(d, groups.majority, opts);
  r.vt_min = v_tilde_norm(d, groups.minority, opts);

  r.kappa1 = r.v_min / r.v_all;
  r.kappa2 = r.v_min / r.v_maj;
  r.kappa1_tilde = r.vt_min / r.vt_all;
  r.kappa2_tilde = r.vt_min / r.vt_maj;
  r.c1 = 1.0 / (2.0 * r.vt_all * r.B);
  r.c2 = 1.0 / (2.0 * r.vt_maj * r.B);

  r.lower_bound = std::max(1.0 - 2.0 * std::sqrt(r.kappa1_tilde + r.c1 * r.c1), 0.0);
  r.upper_bound = std::min(1.0 / r.kappa1 - 1.0, r.B * r.v_all);
  r.lb_precondition_met =
      r.c2 <= 0.5 && r.kappa2_tilde <= std::sqrt(std::max(0.25 - r.c2 * r.c2, 0.0)) + kPreconditionSlop;
  r.ub_precondition_met = r.kappa2 <= 1.0 + kPreconditionSlop;

  r.measured_Bwsp = r.B * max_margin(d, true, opts).model.w_sp(0);
  r.slack_lower = r.measured_Bwsp - r.lower_bound;
  r.slack_upper = r.upper_bound - std::abs(r.measured_Bwsp);
  return r;
}

namespace {

Dataset inv_dataset(const InvSet& pts) {
  std::vector<LabeledPoint> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.emplace_back(p.x, Vector::Constant(1, p.y), p.y);
  Provenance prov;
  prov.generator = "inv_points";
  return Dataset(std::move(out), 1.0, true, std::move(prov));
}

}  // namespace

std::vector<NormCurveRow> norm_growth_curve(const InvSet& inv_points, const std::vector<std::size_t>& sizes,
                                            const NormCurveOptions& opts, const SolverOptions& solver) {
  if (inv_points.empty()) throw Error(ErrorCode::InvalidArgument, "norm curve needs points");
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] == 0 || sizes[k] > inv_points.size())
      throw Error(ErrorCode::InvalidArgument, "curve size " + std::to_string(sizes[k]) + " outside [1, " +
                                                  std::to_string(inv_points.size()) + "]");
    if (k > 0 && sizes[k] < sizes[k - 1]) throw Error(ErrorCode::InvalidArgument, "curve sizes must be ascending");
  }
  const Dataset full = inv_dataset(inv_points);
  std::mt19937_64 rng(opts.seed);

  std::vector<NormCurveRow> rows;
  rows.reserve(sizes.size());
  for (std::size_t n : sizes) {
    IndexList idx(inv_points.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (opts.resample) std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(n);
    if (opts.resample) std::sort(idx.begin(), idx.end());

    NormCurveRow row;
    row.n = n;
    row.v_norm = v_norm(full, idx, solver);
    row.v_tilde_norm = opts.with_tilde ? v_tilde_norm(full, idx, solver) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::vector<double> parse_p_values(const std::string& text) {
  std::vector<double> out;
  std::istringstream is(text);
  std::string cell;
  while (std::getline(is, cell, ',')) out.push_back(parse_double(cell));
  return out;
}

}  // namespace

Proposition verify_highdim_proposition(const Dataset& d, double c, double delta, const std::vector<double>& p_vec,
                                       const SolverOptions& opts) {
  if (!(c > 0) || !(delta > 0 && delta < 1))
    throw Error(ErrorCode::InvalidArgument, "need c > 0 and delta in (0, 1)");
  const auto D = static_cast<std::size_t>(d.sp_dim());
  std::vector<double> ps = p_vec;
  if (ps.empty()) {
    if (const auto* meta = d.provenance().find("p_values")) ps = parse_p_values(*meta);
  }

  Proposition out;
  out.threshold = c * std::sqrt(static_cast<double>(D)) / 2.0;
  out.d_required = std::sqrt(2.0 * std::log(static_cast<double>(d.size()) / delta)) / (2.0 * c);
  out.d_condition = static_cast<double>(D) >= out.d_required;
  out.p_condition = !ps.empty() && (ps.size() == 1 || ps.size() == D);
  for (double p : ps) out.p_condition = out.p_condition && p > 0.5 + c / 2.0;

  const auto sol = max_margin(d, false, opts);
  const double w_inv = d.inv_dim() == 1 ? sol.model.w_inv(0) : sol.model.w_inv.norm();
  const double w_sp = sol.model.w_sp.norm();
  out.ratio = w_inv > 0 ? w_sp / w_inv : std::numeric_limits<double>::infinity();
  out.passed = out.ratio >= out.threshold;
  return out;
}

}  // namespace skewlab
