#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "skewlab/core.hpp"
#include "skewlab/losses.hpp"

namespace skewlab {

enum class DynMode { Flow, Discrete };

DynMode parse_dyn_mode(const std::string& name);
const char* to_string(DynMode mode);

struct DynSpec {
  Loss loss = Loss::Exponential;
  DynMode mode = DynMode::Flow;
  double lr = 1e-3;             // discrete mode
  double weight_decay = 0.0;    // decoupled l2 decay
  std::size_t batch_size = 0;   // 0 = full batch
  std::uint64_t batch_seed = 0;
  std::vector<double> checkpoints;  // times (flow) or epochs (discrete), ascending
  double rel_tol = 1e-8;
  bool compute_residual = true;

  void validate() const;
};

struct TrajectoryRecord {
  double t = 0;
  Vector w_inv;
  Vector w_sp;
  double w_sp_scalar = 0;  // the single spurious weight, or ||w_sp|| for wider blocks
  double beta = 0;         // w_sp B / min_S |w_inv . x_inv|
  double beta_2d = 0;      // w_sp / w_inv (first coordinate), or / ||w_inv||
  double loss = 0;
  double residual_norm = std::numeric_limits<double>::quiet_NaN();
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  std::size_t steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t clamp_events = 0;
  Vector max_margin_direction;  // bias-off max-margin in [inv, sp] order; empty if unavailable
};

/// Mean loss over a dataset for a bias-free linear model w = [w_inv, w_sp].
class LinearObjective {
 public:
  LinearObjective(const Dataset& d, Loss loss, double weight_decay = 0.0);

  double value(const Vector& w) const;
  /// Gradient of the mean loss plus the decay term; optional row subset.
  Vector gradient(const Vector& w) const;
  Vector gradient(const Vector& w, const IndexList& rows) const;

  Eigen::Index dim() const { return signed_rows_.cols(); }
  std::size_t size() const { return static_cast<std::size_t>(signed_rows_.rows()); }
  std::size_t clamp_events() const { return clamp_events_; }

 private:
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> signed_rows_;
  Loss loss_;
  double weight_decay_;
  mutable std::size_t clamp_events_ = 0;
};

Trajectory simulate(const Dataset& d, const DynSpec& spec);

/// Mean update direction at the origin, (1/|S|) sum y_i x_i, in [inv, sp] order.
Vector initial_gradient_direction(const Dataset& d);

/// Log-spaced grid from t_min to t_max inclusive with per_decade points per decade.
std::vector<double> log_grid(double t_min, double t_max, int per_decade);

template <typename Scalar>
struct Weights2d {
  Scalar w_inv;
  Scalar w_sp;
};

/// Exact exponential-loss gradient flow on the four-point 2D task (B = 1):
/// w_inv + w_sp = ln(1 + 2pt), w_inv - w_sp = ln(1 + 2(1-p)t).
template <typename Scalar>
Weights2d<Scalar> closed_form_2dim_exp(Scalar p, Scalar t) {
  using std::log1p;
  const Scalar plus = log1p(Scalar(2) * p * t);
  const Scalar minus = log1p(Scalar(2) * (Scalar(1) - p) * t);
  return {Scalar(0.5) * (plus + minus), Scalar(0.5) * (plus - minus)};
}

/// The value w_sp cannot cross under exponential-loss flow from the origin.
template <typename Scalar>
Scalar fixed_point_exp(Scalar p, Scalar B) {
  using std::log;
  return log(p / (Scalar(1) - p)) / (Scalar(2) * B);
}

template <typename Scalar>
struct Envelope {
  Scalar lower;
  Scalar upper;
};

struct EnvelopeConstants {
  double lower = 1.0;
  double upper = 1.0;
};

/// Envelopes on beta(t) = w_sp(t) B / |w_inv(t) . x_inv| for skew-free data
/// under exponential loss. M is the largest margin of the max-margin classifier.
///   lower = ln((c + p) / (c + sqrt(p(1-p)))) / (2 M ln(1+t)),  c = 2(2M-1)/B^2
///   upper = ln(p / (1-p)) / ln(1+t)
/// i.e. the w_sp bounds (1/B) ln(...) and (1/2B) ln(p/(1-p)) multiplied
/// by B and divided by the |w_inv . x_inv| range [0.5 ln(1+t), 2 M ln(1+t)].
template <typename Scalar>
Envelope<Scalar> skew_free_bounds(Scalar p, Scalar B, Scalar M, Scalar t, EnvelopeConstants k = {}) {
  using std::log;
  using std::log1p;
  using std::sqrt;
  const Scalar c = Scalar(2) * (Scalar(2) * M - Scalar(1)) / (B * B);
  const Scalar lt = log1p(t);
  const Scalar lower_num = log((c + p) / (c + sqrt(p * (Scalar(1) - p))));
  const Scalar w_sp_lower = lower_num / B;
  const Scalar w_sp_upper = log(p / (Scalar(1) - p)) / (Scalar(2) * B);
  return {Scalar(k.lower) * w_sp_lower * B / (Scalar(2) * M * lt),
          Scalar(k.upper) * w_sp_upper * B / (Scalar(0.5) * lt)};
}

/// Numerator of the lower envelope, ln((c + p) / (c + sqrt(p(1-p)))).
template <typename Scalar>
Scalar skew_free_lower_numerator(Scalar p, Scalar B, Scalar M) {
  using std::log;
  using std::sqrt;
  const Scalar c = Scalar(2) * (Scalar(2) * M - Scalar(1)) / (B * B);
  return log((c + p) / (c + sqrt(p * (Scalar(1) - p))));
}

/// Logistic-loss 2D envelopes on w_sp / w_inv (B = 1):
///   lower = min(1, 0.5 ln(2 / (3 - 2p)) / ln(t+1))
///   upper = 0.5 ln(p / (1-p)) / ln(0.5 t + 1)
/// The upper numerator uses p/(1-p); with (1-p)/p it would be negative.
template <typename Scalar>
Envelope<Scalar> logistic_2d_bounds(Scalar p, Scalar t) {
  using std::log;
  using std::log1p;
  using std::min;
  const Scalar lower = min(Scalar(1), Scalar(0.5) * log(Scalar(2) / (Scalar(3) - Scalar(2) * p)) / log1p(t));
  const Scalar upper = Scalar(0.5) * log(p / (Scalar(1) - p)) / log1p(Scalar(0.5) * t);
  return {lower, upper};
}

/// 0.5 ln((2pt + 1) / (2(1-p)t + 1)), the positive-sign form of the logistic
/// 2D w_sp ceiling.
template <typename Scalar>
Scalar logistic_sp_ceiling(Scalar p, Scalar t) {
  using std::log1p;
  return Scalar(0.5) * (log1p(Scalar(2) * p * t) - log1p(Scalar(2) * (Scalar(1) - p) * t));
}

enum class EnvelopeKind { SkewFreeExp, Logistic2d };

struct EnvelopeRow {
  double t = 0;
  double lower = 0;
  double upper = 0;
  double beta = 0;
  bool inside = false;
};

struct EnvelopeCheck {
  std::vector<EnvelopeRow> rows;  // only t >= t0
  double p = 0;
  double M = 0;
  double t0 = 0;
  bool all_inside = false;
};

/// Compare a trajectory's beta against the skew-free or logistic envelopes for t >= t0.
EnvelopeCheck check_envelope(const Dataset& d, const Trajectory& traj, EnvelopeKind kind, double t0,
                             EnvelopeConstants k = {});

}  // namespace skewlab
