#include "skewlab/taskgen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "skewlab/core.hpp"
#include "skewlab/dataset_io.hpp"

namespace skewlab {

namespace {

Vector scalar(double v) { return Vector::Constant(1, v); }

int alternating_label(std::size_t i) { return i % 2 == 0 ? 1 : -1; }

std::size_t exact_majority_count(double p, std::size_t n) {
  // rounds toward the majority
  return std::min(n, static_cast<std::size_t>(std::ceil(p * static_cast<double>(n) - 1e-9)));
}

void record_counts(Provenance& prov, const std::vector<LabeledPoint>& pts, double p_requested) {
  std::size_t maj = 0;
  for (const auto& pt : pts)
    if (pt.x_sp(0) * pt.y > 0) ++maj;
  prov.set("p_requested", format_double(p_requested));
  prov.set("p_empirical", format_double(static_cast<double>(maj) / static_cast<double>(pts.size())));
  prov.set("n_majority", std::to_string(maj));
  prov.set("n_minority", std::to_string(pts.size() - maj));
}

// Emit one invariant point with both spurious signs, k_maj majority copies and
// k_min minority copies, interleaved so that each majority copy is followed by
// its minority twin.
void emit_paired(std::vector<LabeledPoint>& out, const Vector& x_inv, int y, double B, int k_maj, int k_min) {
  const int common = std::min(k_maj, k_min);
  for (int k = 0; k < common; ++k) {
    out.emplace_back(x_inv, scalar(y * B), y);
    out.emplace_back(x_inv, scalar(-y * B), y);
  }
  for (int k = common; k < k_maj; ++k) out.emplace_back(x_inv, scalar(y * B), y);
  for (int k = common; k < k_min; ++k) out.emplace_back(x_inv, scalar(-y * B), y);
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void GenSpec::validate() const {
  if (!(p >= 0.5 && p < 1.0)) throw Error(ErrorCode::InvalidArgument, "p must lie in [0.5, 1)");
  if (!(B > 0) || !std::isfinite(B)) throw Error(ErrorCode::InvalidArgument, "B must be positive");
}

std::pair<int, int> pairing_ratio(double p) {
  int best_maj = 1, best_min = 1;
  double best_err = std::abs(0.5 - p);
  for (int k_min = 1; k_min <= 20; ++k_min) {
    const int k_maj = std::max(1, static_cast<int>(std::lround(p * k_min / (1.0 - p))));
    const double err = std::abs(static_cast<double>(k_maj) / (k_maj + k_min) - p);
    if (err < best_err - 1e-12) {
      best_err = err;
      best_maj = k_maj;
      best_min = k_min;
    }
  }
  return {best_maj, best_min};
}

Dataset gen_2dim(const GenSpec& spec) {
  spec.validate();
  if (spec.n < 2) throw Error(ErrorCode::InvalidArgument, "n must be at least 2");
  const double B = spec.B;
  std::vector<LabeledPoint> pts;
  std::mt19937_64 rng(spec.seed);

  if (spec.pairing) {
    const auto [k_maj, k_min] = pairing_ratio(spec.p);
    const auto base = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::lround(static_cast<double>(spec.n) / (k_maj + k_min))));
    std::bernoulli_distribution coin(0.5);
    for (std::size_t i = 0; i < base; ++i) {
      const int y = spec.exact_counts ? alternating_label(i) : (coin(rng) ? 1 : -1);
      emit_paired(pts, scalar(y), y, B, k_maj, k_min);
    }
  } else if (spec.exact_counts) {
    const std::size_t n_maj = exact_majority_count(spec.p, spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
      const int y = alternating_label(i);
      const double s = i < n_maj ? y * B : -y * B;
      pts.emplace_back(scalar(y), scalar(s), y);
    }
  } else {
    std::bernoulli_distribution coin(0.5), agree(spec.p);
    for (std::size_t i = 0; i < spec.n; ++i) {
      const int y = coin(rng) ? 1 : -1;
      const double s = agree(rng) ? y * B : -y * B;
      pts.emplace_back(scalar(y), scalar(s), y);
    }
  }

  Provenance prov;
  prov.generator = "2dim";
  prov.seed = spec.seed;
  prov.set("exact_counts", spec.exact_counts ? "true" : "false");
  prov.set("pairing", spec.pairing ? "true" : "false");
  record_counts(prov, pts, spec.p);
  return Dataset(std::move(pts), B, true, std::move(prov));
}

Dataset gen_geometric_2d(double maj_margin, double min_margin, std::size_t n_maj, std::size_t n_min, double B) {
  if (!(maj_margin > 0) || !(min_margin > 0)) throw Error(ErrorCode::InvalidArgument, "margins must be positive");
  if (!(B > 0)) throw Error(ErrorCode::InvalidArgument, "B must be positive");
  if (n_maj + n_min == 0) throw Error(ErrorCode::InvalidArgument, "no points requested");
  std::vector<LabeledPoint> pts;
  for (std::size_t k = 0; k < n_maj; ++k) {
    const int y = alternating_label(k);
    pts.emplace_back(scalar(y * maj_margin), scalar(y * B), y);
  }
  for (std::size_t k = 0; k < n_min; ++k) {
    const int y = alternating_label(k);
    pts.emplace_back(scalar(y * min_margin), scalar(-y * B), y);
  }
  Provenance prov;
  prov.generator = "geometric_2d";
  prov.set("maj_margin", format_double(maj_margin));
  prov.set("min_margin", format_double(min_margin));
  record_counts(prov, pts, static_cast<double>(n_maj) / static_cast<double>(n_maj + n_min));
  return Dataset(std::move(pts), B, true, std::move(prov));
}

Dataset attach_spurious(const InvSet& inv_points, const GenSpec& spec) {
  spec.validate();
  if (inv_points.empty()) throw Error(ErrorCode::InvalidArgument, "attach_spurious needs at least one point");
  const double B = spec.B;
  const std::size_t n = inv_points.size();
  std::vector<LabeledPoint> pts;
  std::mt19937_64 rng(spec.seed);

  if (spec.pairing) {
    const auto [k_maj, k_min] = pairing_ratio(spec.p);
    for (const auto& ip : inv_points) emit_paired(pts, ip.x, ip.y, B, k_maj, k_min);
  } else {
    std::vector<bool> majority(n);
    if (spec.exact_counts) {
      IndexList order(n);
      for (std::size_t i = 0; i < n; ++i) order[i] = i;
      std::shuffle(order.begin(), order.end(), rng);
      const std::size_t n_maj = exact_majority_count(spec.p, n);
      for (std::size_t k = 0; k < n_maj; ++k) majority[order[k]] = true;
    } else {
      std::bernoulli_distribution agree(spec.p);
      for (std::size_t i = 0; i < n; ++i) majority[i] = agree(rng);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const int y = inv_points[i].y;
      pts.emplace_back(inv_points[i].x, scalar(majority[i] ? y * B : -y * B), y);
    }
  }

  Provenance prov;
  prov.generator = "attach_spurious";
  prov.seed = spec.seed;
  prov.set("exact_counts", spec.exact_counts ? "true" : "false");
  prov.set("pairing", spec.pairing ? "true" : "false");
  record_counts(prov, pts, spec.p);
  return Dataset(std::move(pts), B, true, std::move(prov));
}

Matrix relu_projection(Eigen::Index in_dim, std::size_t out_dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix W(static_cast<Eigen::Index>(out_dim), in_dim);
  for (Eigen::Index r = 0; r < W.rows(); ++r)
    for (Eigen::Index c = 0; c < W.cols(); ++c) W(r, c) = normal(rng);
  return W;
}

InvSet gen_random_relu_features(const InvSet& raw, std::size_t out_dim, std::uint64_t seed) {
  if (out_dim < 1) throw Error(ErrorCode::InvalidArgument, "out_dim must be at least 1");
  if (raw.empty()) return {};
  const Eigen::Index in_dim = raw.front().x.size();
  for (const auto& r : raw)
    if (r.x.size() != in_dim) throw Error(ErrorCode::InvalidArgument, "raw points have mismatched dimensions");
  const Matrix W = relu_projection(in_dim, out_dim, seed);
  InvSet out;
  out.reserve(raw.size());
  for (const auto& r : raw) out.push_back({(W * r.x).cwiseMax(0.0), r.y});
  return out;
}

Dataset duplicate_majority(const Dataset& d, double ratio, std::uint64_t seed) {
  const auto split = split_groups(d);
  if (split.majority.empty() || split.minority.empty())
    throw Error(ErrorCode::MissingGroup, "duplicate_majority needs both groups");
  const double current = static_cast<double>(split.majority.size()) / static_cast<double>(split.minority.size());
  if (!(ratio > 0) || ratio < current - 1e-12)
    throw Error(ErrorCode::InvalidArgument, "target ratio is below the current majority:minority ratio");
  const auto target = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(split.minority.size())));
  const std::size_t copies = target > split.majority.size() ? target - split.majority.size() : 0;

  std::vector<LabeledPoint> pts = d.points();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, split.majority.size() - 1);
  std::vector<std::size_t> multiplicity(d.size(), 1);
  for (std::size_t k = 0; k < copies; ++k) {
    const auto src = split.majority[pick(rng)];
    pts.push_back(d[src]);
    ++multiplicity[src];
  }

  Provenance prov = d.provenance();
  prov.set("duplicated_ratio", format_double(ratio));
  prov.set("duplicate_copies", std::to_string(copies));
  prov.set("duplicate_seed", std::to_string(seed));
  std::ostringstream mult;
  for (std::size_t i = 0; i < multiplicity.size(); ++i) mult << (i ? " " : "") << multiplicity[i];
  prov.set("multiplicity", mult.str());
  record_counts(prov, pts, d.provenance().find("p_requested") ? parse_double(*d.provenance().find("p_requested"))
                                                               : empirical_p(d));
  return Dataset(std::move(pts), d.sp_scale(), d.sp_two_valued(), std::move(prov));
}

Dataset gen_highdim_spurious(std::size_t n, std::size_t D, const std::vector<double>& p_vec, double inv_margin,
                             std::uint64_t seed) {
  if (n < 1 || D < 1) throw Error(ErrorCode::InvalidArgument, "n and D must be positive");
  if (p_vec.size() != 1 && p_vec.size() != D)
    throw Error(ErrorCode::InvalidArgument, "p_vec must have one entry or D entries");
  for (double p : p_vec)
    if (!(p > 0.5 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "each p_i must lie in (1/2, 1]");
  if (!(inv_margin > 0)) throw Error(ErrorCode::InvalidArgument, "inv_margin must be positive");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<LabeledPoint> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = alternating_label(i);
    Vector sp(static_cast<Eigen::Index>(D));
    for (std::size_t k = 0; k < D; ++k) {
      const double p = p_vec.size() == 1 ? p_vec[0] : p_vec[k];
      sp(static_cast<Eigen::Index>(k)) = unif(rng) < p ? y : -y;
    }
    pts.emplace_back(scalar(y * inv_margin), std::move(sp), y);
  }
  Provenance prov;
  prov.generator = "highdim";
  prov.seed = seed;
  std::ostringstream ps;
  for (std::size_t k = 0; k < p_vec.size(); ++k) ps << (k ? "," : "") << format_double(p_vec[k]);
  prov.set("p_values", ps.str());
  prov.set("inv_margin", format_double(inv_margin));
  return Dataset(std::move(pts), 1.0, false, std::move(prov));
}

BreakerKind parse_breaker_kind(const std::string& name) {
  if (name == "unstable_invariant") return BreakerKind::UnstableInvariant;
  if (name == "cond_dependent") return BreakerKind::CondDependent;
  if (name == "nonorthogonal") return BreakerKind::Nonorthogonal;
  throw Error(ErrorCode::InvalidArgument, "unknown constraint-breaker kind '" + name + "'");
}

std::string to_string(BreakerKind kind) {
  switch (kind) {
    case BreakerKind::UnstableInvariant: return "unstable_invariant";
    case BreakerKind::CondDependent: return "cond_dependent";
    case BreakerKind::Nonorthogonal: return "nonorthogonal";
  }
  return "unknown";
}

Dataset gen_constraint_breakers(BreakerKind kind, const BreakerParams& params) {
  if (params.n < 2) throw Error(ErrorCode::InvalidArgument, "n must be at least 2");
  if (!(params.p >= 0.5 && params.p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "p must lie in [0.5, 1]");
  std::mt19937_64 rng(params.seed);
  std::bernoulli_distribution agree(params.p), coin(0.5);
  // dyadic grid keeps x_inv + (y - x_inv) == y exact in floating point
  std::uniform_int_distribution<int> spread(256, 1792);
  std::vector<LabeledPoint> pts;
  Provenance prov;
  prov.generator = "breaker:" + to_string(kind);
  prov.seed = params.seed;
  double B = 1.0;
  bool two_valued = false;

  switch (kind) {
    case BreakerKind::UnstableInvariant:
      // train: x_inv in {2y, 3y}; test: x_inv = -0.5 + 0.1y next to the true boundary x_inv = -0.5
      for (std::size_t i = 0; i < params.n; ++i) {
        const int y = alternating_label(i);
        const double inv = params.test_split ? -0.5 + 0.1 * y : (coin(rng) ? 2.0 : 3.0) * y;
        pts.emplace_back(scalar(inv), scalar(agree(rng) ? y * B : -y * B), y);
      }
      two_valued = true;
      prov.identical_inv_marginals = false;
      prov.set("split", params.test_split ? "test" : "train");
      break;
    case BreakerKind::CondDependent:
      // x_inv + x_sp = y on every point
      for (std::size_t i = 0; i < params.n; ++i) {
        const int y = alternating_label(i);
        const double inv = y * (spread(rng) / 1024.0);
        pts.emplace_back(scalar(inv), scalar(y - inv), y);
      }
      prov.conditional_independence = false;
      break;
    case BreakerKind::Nonorthogonal:
      // stored as (x_inv, x_inv + x_sp) with x_inv = y and x_sp in {-0.5, 0.5}
      B = 0.5;
      for (std::size_t i = 0; i < params.n; ++i) {
        const int y = alternating_label(i);
        const double sp = agree(rng) ? y * B : -y * B;
        pts.emplace_back(scalar(y), scalar(y + sp), y);
      }
      prov.identity_mapping = false;
      break;
  }
  prov.set("p_requested", format_double(params.p));
  return Dataset(std::move(pts), B, two_valued, std::move(prov));
}

}  // namespace skewlab

namespace skewlab {

InvSet gen_gaussian_inv(std::size_t n, std::size_t dim, double margin, std::uint64_t seed) {
  if (n < 1 || dim < 1) throw Error(ErrorCode::InvalidArgument, "n and dim must be positive");
  if (!(margin > 0)) throw Error(ErrorCode::InvalidArgument, "margin must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  InvSet out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].y = alternating_label(i);
    out[i].x.resize(static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < dim; ++k) out[i].x(static_cast<Eigen::Index>(k)) = normal(rng);
    out[i].x(0) = out[i].y * (margin + std::abs(out[i].x(0)));
  }
  return out;
}

InvSet gen_heavy_tail_inv(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  InvSet out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].y = alternating_label(i);
    const double u = 1.0 - unif(rng);  // (0, 1]
    out[i].x.resize(2);
    out[i].x << out[i].y * u, normal(rng);
  }
  return out;
}

}  // namespace skewlab
