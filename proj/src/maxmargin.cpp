#include "skewlab/maxmargin.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include <Eigen/LU>

namespace skewlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vector concat_weights(const MarginProblem& prob, const LinearModel& model) {
  if (prob.mask == FeatureMask::InvOnly) return model.w_inv;
  Vector w(model.w_inv.size() + model.w_sp.size());
  w << model.w_inv, model.w_sp;
  return w;
}

LinearModel split_weights(const MarginProblem& prob, const Vector& w, double bias) {
  LinearModel m;
  if (prob.mask == FeatureMask::InvOnly) {
    m.w_inv = w;
    m.w_sp = Vector::Zero(prob.sp_dim);
  } else {
    m.w_inv = w.head(prob.inv_dim);
    m.w_sp = w.tail(prob.sp_dim);
  }
  m.bias = bias;
  return m;
}

QpSolution package(const MarginProblem& prob, const Vector& w, double bias, Vector duals, std::size_t iters,
                   bool reached_tol, double tol) {
  QpSolution sol;
  sol.model = split_weights(prob, w, bias);
  sol.duals = std::move(duals);
  sol.objective = 0.5 * w.squaredNorm();
  sol.iterations = iters;
  sol.kkt_residual = kkt_residual(prob, sol.model, sol.duals);
  sol.converged = reached_tol && sol.kkt_residual <= tol;
  return sol;
}

// Dual ascent state: alpha >= 0, w = Z^T alpha, G = Z w - c (gradient of the
// minimisation form of the dual).
struct DualState {
  const MarginProblem& prob;
  Vector alpha;
  Vector w;
  Vector grad;

  explicit DualState(const MarginProblem& p)
      : prob(p),
        alpha(Vector::Zero(static_cast<Eigen::Index>(p.size()))),
        w(Vector::Zero(p.dim())),
        grad(-p.targets) {}

  void refresh() {
    w.noalias() = prob.signed_rows.transpose() * alpha;
    grad.noalias() = prob.signed_rows * w;
    grad -= prob.targets;
  }

  double dual_objective() const { return prob.targets.dot(alpha) - 0.5 * w.squaredNorm(); }

  // Exact line search along the progress made since the last snapshot. The
  // direction keeps sum alpha_i y_i fixed because both end points satisfy it.
  // An unbounded ray with positive slope certifies primal infeasibility.
  void extrapolate(const Vector& snapshot, double cap) {
    const Vector delta = alpha - snapshot;
    if (delta.isZero(0.0)) return;
    const Vector u = prob.signed_rows.transpose() * delta;
    const double slope = prob.targets.dot(delta) - w.dot(u);
    if (!(slope > 0)) return;
    const double curvature = u.squaredNorm();
    double step = curvature > 0 ? slope / curvature : kInf;
    Eigen::Index binding = -1;
    for (Eigen::Index i = 0; i < delta.size(); ++i) {
      if (delta(i) < 0) {
        const double r = alpha(i) / -delta(i);
        if (r < step) {
          step = r;
          binding = i;
        }
      }
    }
    if (!std::isfinite(step) || slope * step - 0.5 * curvature * step * step > cap)
      throw Error(ErrorCode::NotSeparable, "dual objective unbounded: margin constraints are infeasible");
    if (step <= 0) return;
    alpha += step * delta;
    if (binding >= 0) alpha(binding) = 0.0;
    alpha = alpha.cwiseMax(0.0);
    refresh();
  }
};

struct Polished {
  Vector w;
  double bias = 0;
  Vector alpha;
};

// Exact KKT solve on the support {alpha_i > 0}. Empty when the support is
// degenerate, the system singular, or a multiplier comes out negative.
std::optional<Polished> polish_support(const MarginProblem& prob, const Vector& alpha) {
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < alpha.size(); ++i)
    if (alpha(i) > 0) support.push_back(i);
  const auto k = static_cast<Eigen::Index>(support.size());
  const Eigen::Index extra = prob.bias ? 1 : 0;
  if (k == 0 || k > prob.dim() + extra) return std::nullopt;

  Matrix S(k, prob.dim());
  Vector rhs = Vector::Zero(k + extra);
  for (Eigen::Index a = 0; a < k; ++a) {
    S.row(a) = prob.signed_rows.row(support[a]);
    rhs(a) = prob.targets(support[a]);
  }
  Matrix K = Matrix::Zero(k + extra, k + extra);
  K.topLeftCorner(k, k).noalias() = S * S.transpose();
  if (prob.bias) {
    for (Eigen::Index a = 0; a < k; ++a) K(a, k) = K(k, a) = prob.labels(support[a]);
  }
  Eigen::FullPivLU<Matrix> lu(K);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) return std::nullopt;
  const Vector sol = lu.solve(rhs);
  if ((sol.head(k).array() < 0).any()) return std::nullopt;

  Polished out;
  out.alpha = Vector::Zero(alpha.size());
  for (Eigen::Index a = 0; a < k; ++a) out.alpha(support[a]) = sol(a);
  out.w = S.transpose() * sol.head(k);
  out.bias = prob.bias ? sol(k) : 0.0;
  return out;
}

}  // namespace

MarginProblem MarginProblem::from(const Dataset& d, FeatureMask mask, bool bias) {
  return from(d, mask, bias, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(d.size())));
}

MarginProblem MarginProblem::from(const Dataset& d, FeatureMask mask, bool bias, Eigen::VectorXd targets) {
  if (targets.size() != static_cast<Eigen::Index>(d.size()))
    throw Error(ErrorCode::InvalidArgument, "targets length must equal the number of points");
  for (Eigen::Index i = 0; i < targets.size(); ++i)
    if (!std::isfinite(targets(i)) || targets(i) < 0)
      throw Error(ErrorCode::InvalidArgument, "margin targets must be finite and non-negative");
  MarginProblem p;
  p.labels = skewlab::labels(d);
  p.signed_rows = p.labels.asDiagonal() * design_matrix(d, mask);
  p.targets = std::move(targets);
  p.mask = mask;
  p.bias = bias;
  p.inv_dim = d.inv_dim();
  p.sp_dim = d.sp_dim();
  return p;
}

double kkt_residual(const MarginProblem& prob, const LinearModel& model, const Eigen::VectorXd& duals) {
  const Vector w = concat_weights(prob, model);
  const double b = prob.bias ? model.bias : 0.0;
  double res = (w - prob.signed_rows.transpose() * duals).lpNorm<Eigen::Infinity>();
  if (!prob.bias && model.bias != 0.0) res = std::max(res, std::abs(model.bias));
  const Vector r = prob.signed_rows * w + b * prob.labels - prob.targets;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    res = std::max(res, -r(i));                 // primal feasibility
    res = std::max(res, -duals(i));             // dual feasibility
    if (duals(i) > 0) res = std::max(res, std::abs(r(i)));  // complementary slackness
  }
  if (prob.bias) res = std::max(res, std::abs(duals.dot(prob.labels)));
  return res;
}

QpSolution solve_least_norm(const MarginProblem& prob, const SolverOptions& opts) {
  if (!(opts.tol > 0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  const auto n = static_cast<Eigen::Index>(prob.size());
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "empty margin problem");
  const auto& Z = prob.signed_rows;
  const auto& y = prob.labels;

  if (prob.targets.maxCoeff() <= 0)
    return package(prob, Vector::Zero(prob.dim()), 0.0, Vector::Zero(n), 0, true, opts.tol);

  if (prob.bias) {
    const bool has_pos = (y.array() > 0).any();
    const bool has_neg = (y.array() < 0).any();
    if (!has_pos || !has_neg) {
      // The bias alone reaches every target.
      const double b = (has_pos ? 1.0 : -1.0) * prob.targets.maxCoeff();
      return package(prob, Vector::Zero(prob.dim()), b, Vector::Zero(n), 0, true, opts.tol);
    }
  }

  DualState st(prob);
  Vector snapshot = st.alpha;
  const std::size_t extrapolate_every = std::max<std::size_t>(64, prob.size());
  constexpr std::size_t kRefreshEvery = 4096;

  std::size_t iter = 0;
  bool reached = false;
  double m_up = 0, m_low = 0;

  // Row i of Z times y_i recovers x_i; pair directions live in x-space.
  auto x_row = [&](Eigen::Index i) { return y(i) * Z.row(i).transpose(); };

  Vector sq_norms;
  Vector cross;
  if (prob.bias) sq_norms = Z.rowwise().squaredNorm();

  for (;;) {
    if (prob.bias) {
      m_up = -kInf;
      m_low = kInf;
      Eigen::Index i = -1, j = -1;
      for (Eigen::Index t = 0; t < n; ++t) {
        const double v = -y(t) * st.grad(t);
        const bool free = st.alpha(t) > 0;
        if ((y(t) > 0 || free) && v > m_up) {
          m_up = v;
          i = t;
        }
        if ((y(t) < 0 || free) && v < m_low) m_low = v;
      }
      if (m_up - m_low <= opts.tol) {
        reached = true;
        break;
      }
      if (iter >= opts.max_iter) break;

      // Second-order choice of j: largest dual gain of the pair's Newton step.
      cross.noalias() = Z * x_row(i);
      double best_gain = -kInf;
      for (Eigen::Index t = 0; t < n; ++t) {
        if (!(y(t) < 0 || st.alpha(t) > 0)) continue;
        const double v = -y(t) * st.grad(t);
        if (v >= m_up) continue;
        double a = sq_norms(i) + sq_norms(t) - 2.0 * y(t) * cross(t);
        if (a <= 0) a = 1e-12;
        const double gain = (m_up - v) * (m_up - v) / a;
        if (gain > best_gain) {
          best_gain = gain;
          j = t;
        }
      }

      const Vector dx = x_row(i) - x_row(j);
      const double curvature = dx.squaredNorm();
      const double slope = y(i) * st.grad(i) - y(j) * st.grad(j);  // < 0
      double bound = kInf;
      if (y(i) < 0) bound = std::min(bound, st.alpha(i));
      if (y(j) > 0) bound = std::min(bound, st.alpha(j));
      const double step = curvature > 0 ? std::min(-slope / curvature, bound) : bound;
      if (!std::isfinite(step))
        throw Error(ErrorCode::NotSeparable,
                    "points " + std::to_string(i) + " and " + std::to_string(j) + " cannot be separated");
      st.alpha(i) += y(i) * step;
      st.alpha(j) -= y(j) * step;
      if (step == bound) {
        if (y(i) < 0 && st.alpha(i) < 1e-300) st.alpha(i) = 0;
        if (y(j) > 0 && st.alpha(j) < 1e-300) st.alpha(j) = 0;
      }
      st.w.noalias() += step * dx;
      st.grad.noalias() += step * (Z * dx);
    } else {
      double worst = 0;
      Eigen::Index i = -1;
      for (Eigen::Index t = 0; t < n; ++t) {
        const double g = st.grad(t);
        const double v = st.alpha(t) > 0 ? std::abs(g) : std::max(0.0, -g);
        if (v > worst) {
          worst = v;
          i = t;
        }
      }
      if (worst <= opts.tol) {
        reached = true;
        break;
      }
      if (iter >= opts.max_iter) break;

      const double q = Z.row(i).squaredNorm();
      if (q == 0)
        throw Error(ErrorCode::NotSeparable, "point " + std::to_string(i) + " has zero features and a positive target");
      const double next = std::max(0.0, st.alpha(i) - st.grad(i) / q);
      const double step = next - st.alpha(i);
      st.alpha(i) = next;
      st.w.noalias() += step * Z.row(i).transpose();
      st.grad.noalias() += step * (Z * Z.row(i).transpose());
    }
    ++iter;

    if (iter % kRefreshEvery == 0) st.refresh();
    if (iter % extrapolate_every == 0) {
      // Scaling alpha bounds the primal optimum below by (c.a)^2 / (2 |Z^T a|^2).
      const double ca = prob.targets.dot(st.alpha);
      const double wa = (Z.transpose() * st.alpha).squaredNorm();
      if (ca > 0 && ca * ca > 2.0 * opts.divergence_cap * wa)
        throw Error(ErrorCode::NotSeparable, "dual ray certifies that the margin constraints are infeasible");
      st.extrapolate(snapshot, opts.divergence_cap);
      snapshot = st.alpha;
    }
    if (!std::isfinite(st.w.squaredNorm()) || st.dual_objective() > opts.divergence_cap)
      throw Error(ErrorCode::NotSeparable, "dual objective exceeded the divergence cap");
  }

  st.refresh();
  double b = 0.0;
  if (prob.bias) {
    m_up = -kInf;
    m_low = kInf;
    for (Eigen::Index t = 0; t < n; ++t) {
      const double v = -y(t) * st.grad(t);
      const bool free = st.alpha(t) > 0;
      if (y(t) > 0 || free) m_up = std::max(m_up, v);
      if (y(t) < 0 || free) m_low = std::min(m_low, v);
    }
    b = 0.5 * (m_up + m_low);
  }
  auto sol = package(prob, st.w, b, st.alpha, iter, reached, opts.tol);
  if (auto polished = polish_support(prob, st.alpha)) {
    auto alt = package(prob, polished->w, polished->bias, std::move(polished->alpha), iter, reached, opts.tol);
    if (alt.kkt_residual <= sol.kkt_residual) {
      alt.converged = alt.kkt_residual <= opts.tol;
      return alt;
    }
  }
  return sol;
}

QpSolution oracle_active_set(const MarginProblem& prob) {
  const std::size_t n = prob.size();
  const Eigen::Index d = prob.dim();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "empty margin problem");
  if (n > kOracleMaxPoints || d > kOracleMaxDims)
    throw Error(ErrorCode::BudgetExceeded, "oracle budget is 16 points and 4 feature dimensions");

  const auto& Z = prob.signed_rows;
  const auto& y = prob.labels;
  const auto& c = prob.targets;
  const std::size_t max_active = std::min<std::size_t>(n, static_cast<std::size_t>(d) + (prob.bias ? 1 : 0));
  constexpr double kFeasTol = 1e-9;

  bool found = false;
  double best = kInf;
  Vector best_w, best_alpha;
  double best_b = 0;

  auto feasible = [&](const Vector& w, double b) {
    const Vector r = Z * w + b * y - c;
    for (Eigen::Index i = 0; i < r.size(); ++i)
      if (r(i) < -kFeasTol * (1.0 + c(i))) return false;
    return true;
  };

  // Empty active set: w = 0 and, with a bias, any b in the feasible interval.
  {
    double lo = -kInf, hi = kInf;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (y(i) > 0)
        lo = std::max(lo, c(i));
      else
        hi = std::min(hi, -c(i));
    }
    const double b = prob.bias ? std::clamp(0.0, lo, hi) : 0.0;
    const Vector w = Vector::Zero(d);
    if ((!prob.bias || lo <= hi) && feasible(w, b)) {
      found = true;
      best = 0;
      best_w = w;
      best_b = b;
      best_alpha = Vector::Zero(static_cast<Eigen::Index>(n));
    }
  }

  const std::uint32_t limit = 1u << n;
  std::vector<Eigen::Index> active;
  for (std::uint32_t mask = 1; mask < limit; ++mask) {
    const auto k = static_cast<std::size_t>(std::popcount(mask));
    if (k > max_active) continue;
    active.clear();
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) active.push_back(static_cast<Eigen::Index>(i));

    const auto ka = static_cast<Eigen::Index>(k);
    const Eigen::Index sz = ka + (prob.bias ? 1 : 0);
    Matrix Za(ka, d);
    Vector rhs = Vector::Zero(sz);
    for (Eigen::Index r = 0; r < ka; ++r) {
      Za.row(r) = Z.row(active[static_cast<std::size_t>(r)]);
      rhs(r) = c(active[static_cast<std::size_t>(r)]);
    }
    Matrix K = Matrix::Zero(sz, sz);
    K.topLeftCorner(ka, ka) = Za * Za.transpose();
    if (prob.bias) {
      for (Eigen::Index r = 0; r < ka; ++r) {
        K(r, ka) = y(active[static_cast<std::size_t>(r)]);
        K(ka, r) = y(active[static_cast<std::size_t>(r)]);
      }
    }
    Eigen::FullPivLU<Matrix> lu(K);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) continue;
    const Vector sol = lu.solve(rhs);
    const Vector alpha_a = sol.head(ka);
    const double b = prob.bias ? sol(ka) : 0.0;
    const double scale = 1.0 + alpha_a.cwiseAbs().maxCoeff();
    if ((alpha_a.array() < -1e-10 * scale).any()) continue;
    const Vector w = Za.transpose() * alpha_a;
    if (!feasible(w, b)) continue;
    const double norm2 = w.squaredNorm();
    if (!found || norm2 < best) {
      found = true;
      best = norm2;
      best_w = w;
      best_b = b;
      best_alpha = Vector::Zero(static_cast<Eigen::Index>(n));
      for (Eigen::Index r = 0; r < ka; ++r) best_alpha(active[static_cast<std::size_t>(r)]) = std::max(0.0, alpha_a(r));
    }
  }

  if (!found) throw Error(ErrorCode::NotSeparable, "no feasible active set");
  QpSolution sol;
  sol.model = split_weights(prob, best_w, best_b);
  sol.duals = best_alpha;
  sol.objective = 0.5 * best;
  sol.kkt_residual = kkt_residual(prob, sol.model, sol.duals);
  sol.iterations = static_cast<std::size_t>(limit);
  sol.converged = true;
  return sol;
}

double v_norm(const Dataset& d, const IndexList& subset, const SolverOptions& opts) {
  if (subset.empty()) throw Error(ErrorCode::InvalidArgument, "v_norm needs a non-empty subset");
  const auto sol = solve_least_norm(MarginProblem::from(d.subset(subset), FeatureMask::InvOnly, true), opts);
  return sol.model.w_inv.norm();
}

double v_tilde_norm(const Dataset& d, const IndexList& subset, const SolverOptions& opts) {
  Eigen::VectorXd targets = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d.size()));
  for (auto i : subset) {
    if (i >= d.size()) throw Error(ErrorCode::InvalidArgument, "subset index out of range");
    targets(static_cast<Eigen::Index>(i)) = 1.0;
  }
  const auto sol = solve_least_norm(MarginProblem::from(d, FeatureMask::InvOnly, true, std::move(targets)), opts);
  return sol.model.w_inv.norm();
}

QpSolution balanced_max_margin(const Dataset& d, double c, const SolverOptions& opts) {
  if (!(c > 0) || c > 1) throw Error(ErrorCode::InvalidArgument, "balance constant must lie in (0, 1]");
  const auto split = split_groups(d);
  if (split.majority.empty() || split.minority.empty())
    throw Error(ErrorCode::MissingGroup, "balanced max-margin needs both groups");
  Eigen::VectorXd targets = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(d.size()));
  for (auto i : split.minority) targets(static_cast<Eigen::Index>(i)) = 1.0 / c;
  return solve_least_norm(MarginProblem::from(d, FeatureMask::Full, true, std::move(targets)), opts);
}

QpSolution max_margin(const Dataset& d, bool bias, const SolverOptions& opts) {
  return solve_least_norm(MarginProblem::from(d, FeatureMask::Full, bias), opts);
}

}  // namespace skewlab
