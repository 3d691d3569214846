#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "skewlab/types.hpp"

namespace skewlab {

struct GenSpec {
  std::string generator = "2dim";
  std::size_t n = 4;
  double p = 0.5;      // spurious-correlation level, [0.5, 1)
  double B = 1.0;      // spurious scale
  std::uint64_t seed = 0;
  bool exact_counts = true;
  // Emit every invariant point with both spurious signs, in the smallest
  // integer ratio k_maj:k_min approximating p:(1-p). Keeps the invariant
  // multisets of the two groups identical.
  bool pairing = false;

  void validate() const;
};

struct InvPoint {
  Vector x;
  int y = 1;
};
using InvSet = std::vector<InvPoint>;

/// Smallest (k_maj, k_min) with k_maj / (k_maj + k_min) closest to p, k_min <= 20.
std::pair<int, int> pairing_ratio(double p);

Dataset gen_2dim(const GenSpec& spec);

Dataset gen_geometric_2d(double maj_margin, double min_margin, std::size_t n_maj, std::size_t n_min,
                         double B);

/// Alternating labels; x ~ N(0, I) with the first coordinate replaced by
/// y (margin + |z|), so e_0 separates with margin `margin`.
InvSet gen_gaussian_inv(std::size_t n, std::size_t dim, double margin, std::uint64_t seed);

/// Alternating labels; x = (y u, z) with u ~ U(0, 1], z ~ N(0, 1). 1/u has
/// a Pareto(1) tail, so the smallest margin keeps shrinking as points are added.
InvSet gen_heavy_tail_inv(std::size_t n, std::uint64_t seed);

/// Attach a two-valued spurious feature independent of x_inv given y.
Dataset attach_spurious(const InvSet& inv_points, const GenSpec& spec);

/// x -> max(0, W x), W with i.i.d. standard normal entries drawn from seed.
InvSet gen_random_relu_features(const InvSet& raw, std::size_t out_dim, std::uint64_t seed);
/// The projection matrix gen_random_relu_features uses for (in_dim, out_dim, seed).
Matrix relu_projection(Eigen::Index in_dim, std::size_t out_dim, std::uint64_t seed);

/// Append majority copies drawn with replacement until |maj| : |min| ~= ratio.
Dataset duplicate_majority(const Dataset& d, double ratio, std::uint64_t seed = 0);

Dataset gen_highdim_spurious(std::size_t n, std::size_t D, const std::vector<double>& p_vec,
                             double inv_margin, std::uint64_t seed);

enum class BreakerKind { UnstableInvariant, CondDependent, Nonorthogonal };

BreakerKind parse_breaker_kind(const std::string& name);
std::string to_string(BreakerKind kind);

struct BreakerParams {
  std::size_t n = 40;
  double p = 0.9;
  std::uint64_t seed = 0;
  bool test_split = false;  // unstable_invariant: draw the shifted test split
};

Dataset gen_constraint_breakers(BreakerKind kind, const BreakerParams& params);

/// splitmix64 mixing step; used to derive per-epoch and per-cell seeds.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace skewlab
