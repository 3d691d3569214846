#pragma once

#include <cstddef>

#include "skewlab/core.hpp"

namespace skewlab {

/// Least-norm margin problem
///
///   min ||w||^2 / 2   s.t.   y_i (w . x_i + b) >= c_i
///
/// over the masked features, with b fixed to zero unless bias is enabled.
/// The problem owns its signed rows z_i = y_i x_i, independent of the source
/// dataset.
struct MarginProblem {
  Matrix signed_rows;         // n x d, row i is y_i * x_i
  Eigen::VectorXd labels;     // +-1
  Eigen::VectorXd targets;    // c_i >= 0
  FeatureMask mask = FeatureMask::Full;
  bool bias = true;
  Eigen::Index inv_dim = 0;
  Eigen::Index sp_dim = 0;

  std::size_t size() const { return static_cast<std::size_t>(labels.size()); }
  Eigen::Index dim() const { return signed_rows.cols(); }

  /// Unit targets on every point.
  static MarginProblem from(const Dataset& d, FeatureMask mask, bool bias);
  static MarginProblem from(const Dataset& d, FeatureMask mask, bool bias, Eigen::VectorXd targets);
};

struct SolverOptions {
  double tol = 1e-8;
  std::size_t max_iter = 1'000'000;
  double divergence_cap = 1e12;
};

struct QpSolution {
  LinearModel model;
  Eigen::VectorXd duals;
  double objective = 0.0;     // ||w||^2 / 2
  double kkt_residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Dual ascent on the hard-margin dual: maximal-violating-pair updates when the
/// bias is enabled (keeps sum alpha_i y_i = 0), single coordinates otherwise.
/// Throws Error(NotSeparable) once the dual objective passes the cap.
QpSolution solve_least_norm(const MarginProblem& prob, const SolverOptions& opts = {});

/// Max violation of primal feasibility, complementary slackness and the bias
/// equality for a candidate (model, duals) pair.
double kkt_residual(const MarginProblem& prob, const LinearModel& model, const Eigen::VectorXd& duals);

/// Exhaustive active-set oracle for small instances (<= 16 points, <= 4 dims).
QpSolution oracle_active_set(const MarginProblem& prob);

inline constexpr std::size_t kOracleMaxPoints = 16;
inline constexpr Eigen::Index kOracleMaxDims = 4;

/// ||v(T)||: least-norm inv-only classifier (bias on) with margin 1 on T.
double v_norm(const Dataset& d, const IndexList& subset, const SolverOptions& opts = {});
/// ||v~(T)||: as v_norm but with zero-margin constraints on the complement of T.
double v_tilde_norm(const Dataset& d, const IndexList& subset, const SolverOptions& opts = {});

/// Full-mask solve with targets 1 on the majority and 1/c on the minority.
QpSolution balanced_max_margin(const Dataset& d, double c, const SolverOptions& opts = {});

/// Full max-margin (unit targets) with the given bias setting.
QpSolution max_margin(const Dataset& d, bool bias = true, const SolverOptions& opts = {});

}  // namespace skewlab
