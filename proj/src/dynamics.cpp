#include "skewlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "skewlab/maxmargin.hpp"
#include "skewlab/taskgen.hpp"

namespace skewlab {

DynMode parse_dyn_mode(const std::string& name) {
  if (name == "flow") return DynMode::Flow;
  if (name == "discrete") return DynMode::Discrete;
  throw Error(ErrorCode::InvalidArgument, "unknown dynamics mode '" + name + "'");
}

const char* to_string(DynMode mode) { return mode == DynMode::Flow ? "flow" : "discrete"; }

void DynSpec::validate() const {
  if (!(weight_decay >= 0) || !std::isfinite(weight_decay))
    throw Error(ErrorCode::InvalidArgument, "weight_decay must be nonnegative");
  if (!(rel_tol > 0)) throw Error(ErrorCode::InvalidArgument, "rel_tol must be positive");
  if (mode == DynMode::Discrete && !(lr > 0)) throw Error(ErrorCode::InvalidArgument, "lr must be positive");
  if (checkpoints.empty()) throw Error(ErrorCode::InvalidArgument, "at least one checkpoint is required");
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    const double c = checkpoints[k];
    if (!(c >= 0) || !std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "checkpoints must be finite and >= 0");
    if (k > 0 && !(c > checkpoints[k - 1])) throw Error(ErrorCode::InvalidArgument, "checkpoints must be ascending");
    if (mode == DynMode::Discrete && c != std::floor(c))
      throw Error(ErrorCode::InvalidArgument, "discrete checkpoints are whole epochs");
  }
}

LinearObjective::LinearObjective(const Dataset& d, Loss loss, double weight_decay)
    : signed_rows_(static_cast<Eigen::Index>(d.size()), d.inv_dim() + d.sp_dim()),
      loss_(loss),
      weight_decay_(weight_decay) {
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    signed_rows_.row(r) << d[i].x_inv.transpose(), d[i].x_sp.transpose();
    signed_rows_.row(r) *= d[i].y;
  }
}

double LinearObjective::value(const Vector& w) const {
  double total = 0;
  for (Eigen::Index i = 0; i < signed_rows_.rows(); ++i) {
    bool clamped = false;
    double m = signed_rows_.row(i).dot(w);
    if (loss_ == Loss::Exponential) m = clamp_margin(m, &clamped);
    if (clamped) ++clamp_events_;
    total += loss_value(loss_, m);
  }
  return total / static_cast<double>(signed_rows_.rows());
}

Vector LinearObjective::gradient(const Vector& w) const {
  IndexList all(size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return gradient(w, all);
}

Vector LinearObjective::gradient(const Vector& w, const IndexList& rows) const {
  if (rows.empty()) throw Error(ErrorCode::InvalidArgument, "gradient over an empty batch");
  Vector g = Vector::Zero(dim());
  // Point-by-point accumulation in a fixed order: paired twins cancel exactly.
  for (auto i : rows) {
    const auto r = static_cast<Eigen::Index>(i);
    bool clamped = false;
    double m = signed_rows_.row(r).dot(w);
    if (loss_ == Loss::Exponential) m = clamp_margin(m, &clamped);
    if (clamped) ++clamp_events_;
    g += loss_slope(loss_, m) * signed_rows_.row(r).transpose();
  }
  g /= static_cast<double>(rows.size());
  if (weight_decay_ > 0) g += weight_decay_ * w;
  if (!g.allFinite()) throw Error(ErrorCode::NonFiniteGradient, "gradient has non-finite entries");
  return g;
}

Vector initial_gradient_direction(const Dataset& d) {
  Vector g = Vector::Zero(d.inv_dim() + d.sp_dim());
  for (const auto& p : d.points()) {
    g.head(d.inv_dim()) += p.y * p.x_inv;
    g.tail(d.sp_dim()) += p.y * p.x_sp;
  }
  return g / static_cast<double>(d.size());
}

std::vector<double> log_grid(double t_min, double t_max, int per_decade) {
  if (!(t_min > 0) || !(t_max >= t_min) || per_decade < 1)
    throw Error(ErrorCode::InvalidArgument, "log_grid needs 0 < t_min <= t_max and per_decade >= 1");
  std::vector<double> out;
  const double a = std::log10(t_min);
  const double b = std::log10(t_max);
  const auto steps = static_cast<int>(std::ceil((b - a) * per_decade - 1e-9));
  for (int k = 0; k < steps; ++k) out.push_back(std::pow(10.0, a + static_cast<double>(k) / per_decade));
  if (!out.empty()) out.front() = t_min;
  out.push_back(t_max);
  return out;
}

namespace {

struct Recorder {
  const Dataset& d;
  Vector max_margin;  // empty when unavailable
  double min_inv_scale(const Vector& w_inv) const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& p : d.points()) m = std::min(m, std::abs(w_inv.dot(p.x_inv)));
    return m;
  }

  TrajectoryRecord make(double t, double t_eff, const Vector& w, double loss) const {
    TrajectoryRecord rec;
    rec.t = t;
    rec.w_inv = w.head(d.inv_dim());
    rec.w_sp = w.tail(d.sp_dim());
    rec.w_sp_scalar = d.sp_dim() == 1 ? rec.w_sp(0) : rec.w_sp.norm();
    const double num = rec.w_sp_scalar * d.sp_scale();
    const double den = min_inv_scale(rec.w_inv);
    rec.beta = num == 0 ? 0.0 : num / den;
    const double inv = d.inv_dim() == 1 ? rec.w_inv(0) : rec.w_inv.norm();
    rec.beta_2d = rec.w_sp_scalar == 0 ? 0.0 : rec.w_sp_scalar / inv;
    rec.loss = loss;
    if (max_margin.size() > 0) rec.residual_norm = (w - max_margin * std::log1p(t_eff)).norm();
    return rec;
  }
};

Vector rk4_step(const LinearObjective& f, const Vector& y, double h) {
  const Vector k1 = -f.gradient(y);
  const Vector k2 = -f.gradient(y + 0.5 * h * k1);
  const Vector k3 = -f.gradient(y + 0.5 * h * k2);
  const Vector k4 = -f.gradient(y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void run_flow(const LinearObjective& f, const DynSpec& spec, const Recorder& rec, Trajectory& traj) {
  Vector w = Vector::Zero(f.dim());
  double t = 0;
  double h = 1e-3;
  for (double target : spec.checkpoints) {
    while (t < target) {
      const double room = target - t;
      const bool clipped = h >= room;
      const double step = clipped ? room : h;
      const Vector full = rk4_step(f, w, step);
      const Vector half = rk4_step(f, rk4_step(f, w, 0.5 * step), 0.5 * step);
      const double err = (half - full).cwiseAbs().maxCoeff() / 15.0;
      const double scale = std::max(1.0, half.cwiseAbs().maxCoeff());
      const double tol = spec.rel_tol * scale;
      double factor = err > 0 ? 0.9 * std::pow(tol / err, 0.2) : 5.0;
      factor = std::clamp(factor, 0.2, 5.0);
      if (err <= tol) {
        w = half;
        t = clipped ? target : t + step;
        ++traj.steps;
        h = clipped ? std::max(h, step * factor) : step * factor;
      } else {
        ++traj.rejected_steps;
        h = step * factor;
        if (h < 1e-14 * std::max(1.0, t))
          throw Error(ErrorCode::NonFiniteGradient, "integrator step underflow at t = " + std::to_string(t));
      }
    }
    traj.records.push_back(rec.make(target, target, w, f.value(w)));
  }
}

void run_discrete(const LinearObjective& f, const DynSpec& spec, const Recorder& rec, Trajectory& traj) {
  const std::size_t n = f.size();
  const std::size_t batch = spec.batch_size == 0 || spec.batch_size >= n ? n : spec.batch_size;
  Vector w = Vector::Zero(f.dim());
  IndexList order(n);
  std::size_t epoch = 0;
  for (double target : spec.checkpoints) {
    const auto last = static_cast<std::size_t>(target);
    for (; epoch < last; ++epoch) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      if (batch < n) {
        std::mt19937_64 rng(splitmix64(splitmix64(spec.batch_seed) ^ static_cast<std::uint64_t>(epoch + 1)));
        std::shuffle(order.begin(), order.end(), rng);
      }
      for (std::size_t start = 0; start < n; start += batch) {
        const IndexList rows(order.begin() + static_cast<std::ptrdiff_t>(start),
                             order.begin() + static_cast<std::ptrdiff_t>(std::min(n, start + batch)));
        const Vector g = f.gradient(w, rows);
        w -= spec.lr * g;
        if (spec.weight_decay > 0) w -= spec.lr * spec.weight_decay * w;
        ++traj.steps;
      }
    }
    const double t_eff = spec.lr * static_cast<double>(traj.steps);
    traj.records.push_back(rec.make(target, t_eff, w, f.value(w)));
  }
}

}  // namespace

Trajectory simulate(const Dataset& d, const DynSpec& spec) {
  spec.validate();
  Trajectory traj;
  if (spec.compute_residual) {
    try {
      const auto sol = max_margin(d, false);
      traj.max_margin_direction.resize(d.inv_dim() + d.sp_dim());
      traj.max_margin_direction << sol.model.w_inv, sol.model.w_sp;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotSeparable) throw;
    }
  }
  const Recorder rec{d, traj.max_margin_direction};
  if (spec.mode == DynMode::Flow) {
    const LinearObjective f(d, spec.loss, spec.weight_decay);
    run_flow(f, spec, rec, traj);
    traj.clamp_events = f.clamp_events();
  } else {
    // decay is applied as a separate decoupled step
    const LinearObjective f(d, spec.loss, 0.0);
    run_discrete(f, spec, rec, traj);
    traj.clamp_events = f.clamp_events();
  }
  return traj;
}

EnvelopeCheck check_envelope(const Dataset& d, const Trajectory& traj, EnvelopeKind kind, double t0,
                             EnvelopeConstants k) {
  EnvelopeCheck out;
  out.p = empirical_p(d);
  out.t0 = t0;
  Vector w_hat = traj.max_margin_direction;
  if (w_hat.size() == 0) {
    const auto sol = max_margin(d, false);
    w_hat.resize(d.inv_dim() + d.sp_dim());
    w_hat << sol.model.w_inv, sol.model.w_sp;
  }
  out.M = -std::numeric_limits<double>::infinity();
  for (const auto& p : d.points()) {
    Vector z(w_hat.size());
    z << p.x_inv, p.x_sp;
    out.M = std::max(out.M, p.y * w_hat.dot(z));
  }

  out.all_inside = true;
  for (const auto& r : traj.records) {
    if (r.t < t0 || r.t <= 0) continue;
    EnvelopeRow row;
    row.t = r.t;
    if (kind == EnvelopeKind::SkewFreeExp) {
      const auto env = skew_free_bounds(out.p, d.sp_scale(), out.M, r.t, k);
      row.lower = env.lower;
      row.upper = env.upper;
      row.beta = r.beta;
    } else {
      const auto env = logistic_2d_bounds(out.p, r.t);
      row.lower = k.lower * env.lower;
      row.upper = k.upper * env.upper;
      row.beta = r.beta_2d;
    }
    row.inside = row.beta >= row.lower && row.beta <= row.upper;
    out.all_inside = out.all_inside && row.inside;
    out.rows.push_back(row);
  }
  if (out.rows.empty()) out.all_inside = false;
  return out;
}

}  // namespace skewlab
