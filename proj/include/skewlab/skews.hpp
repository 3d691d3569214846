#pragma once

#include <cstdint>
#include <vector>

#include "skewlab/maxmargin.hpp"
#include "skewlab/taskgen.hpp"

namespace skewlab {

/// Slop applied to the sharp precondition inequalities on computed norms.
inline constexpr double kPreconditionSlop = 1e-9;

struct SkewReport {
  double v_min = 0, v_maj = 0, v_all = 0;
  double vt_min = 0, vt_maj = 0, vt_all = 0;
  double kappa1 = 0, kappa2 = 0, kappa1_tilde = 0, kappa2_tilde = 0;
  double c1 = 0, c2 = 0;
  double lower_bound = 0, upper_bound = 0;
  bool lb_precondition_met = false;
  bool ub_precondition_met = false;
  double measured_Bwsp = 0;
  double slack_lower = 0, slack_upper = 0;
  double B = 1;
  bool missing_group = false;

  /// True when every bound whose precondition holds is satisfied.
  bool bounds_hold(double slop = kPreconditionSlop) const;
};

/// Lower and upper spurious-weight bounds from the geometric skews.
/// Lower: B w_sp >= max(1 - 2 sqrt(kappa1~ + c1^2), 0), needs kappa2~ <= sqrt(1/4 - c2^2).
/// Upper: |B w_sp| <= min(1/kappa1 - 1, B ||v(S)||), needs kappa2 <= 1.
SkewReport compute_skew_report(const Dataset& d, const SolverOptions& opts = {});

struct NormCurveRow {
  std::size_t n = 0;
  double v_norm = 0;
  double v_tilde_norm = 0;  // margin 1 on the first n points, 0 on the rest
};

struct NormCurveOptions {
  bool resample = false;  // independent random subsets instead of nested prefixes
  std::uint64_t seed = 0;
  bool with_tilde = true;
};

std::vector<NormCurveRow> norm_growth_curve(const InvSet& inv_points, const std::vector<std::size_t>& sizes,
                                            const NormCurveOptions& opts = {},
                                            const SolverOptions& solver = {});

struct Proposition {
  double ratio = 0;       // ||w_sp|| / w_inv
  double threshold = 0;   // c sqrt(D) / 2
  bool passed = false;
  bool p_condition = false;  // every p_i > 1/2 + c/2
  bool d_condition = false;  // D >= sqrt(2 ln(m/delta)) / (2c)
  double d_required = 0;
};

/// Bias-off full max-margin on a high-dimensional spurious dataset.
/// p_vec holds the generating probabilities (one entry per spurious coordinate,
/// or a single entry broadcast to all). When empty, the generator metadata is
/// consulted.
Proposition verify_highdim_proposition(const Dataset& d, double c, double delta,
                                       const std::vector<double>& p_vec = {},
                                       const SolverOptions& opts = {});

}  // namespace skewlab
