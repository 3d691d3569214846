#include <doctest.h>

#include <algorithm>

#include "skewlab/core.hpp"
#include "skewlab/taskgen.hpp"
#include "support.hpp"

using namespace skewlab;
using skewlab::testing::error_code;

namespace {

std::vector<double> sorted_inv(const Dataset& d, const IndexList& idx) {
  std::vector<double> out;
  for (auto i : idx) out.push_back(d[i].x_inv(0) * d[i].y);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("splitmix64 matches the reference sequence") {
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(splitmix64(0x9e3779b97f4a7c15ULL) == 0x6e789e6aa1b965f4ULL);
}

TEST_CASE("pairing ratio") {
  CHECK(pairing_ratio(0.5) == std::pair{1, 1});
  CHECK(pairing_ratio(0.6) == std::pair{3, 2});
  CHECK(pairing_ratio(0.75) == std::pair{3, 1});
  CHECK(pairing_ratio(0.9) == std::pair{9, 1});
}

TEST_CASE("two-dimensional task") {
  GenSpec s;
  s.n = 100;
  s.p = 0.9;
  s.B = 2.0;

  SUBCASE("exact counts") {
    const auto d = gen_2dim(s);
    CHECK(d.size() == 100);
    CHECK(split_groups(d).majority.size() == 90);
    CHECK(d.sp_scale() == 2.0);
    for (const auto& pt : d.points()) CHECK(pt.x_inv(0) == pt.y);
  }
  SUBCASE("paired invariant multisets agree across groups") {
    s.pairing = true;
    const auto d = gen_2dim(s);
    const auto g = split_groups(d);
    CHECK(g.majority.size() == 9 * g.minority.size());
    auto maj = sorted_inv(d, g.majority);
    maj.erase(std::unique(maj.begin(), maj.end()), maj.end());
    auto min = sorted_inv(d, g.minority);
    min.erase(std::unique(min.begin(), min.end()), min.end());
    CHECK(maj == min);
  }
  SUBCASE("sampled mode depends on the seed only") {
    s.exact_counts = false;
    const auto a = gen_2dim(s);
    const auto b = gen_2dim(s);
    s.seed = 7;
    const auto c = gen_2dim(s);
    CHECK(a == b);
    CHECK_FALSE(a == c);
  }
  SUBCASE("invalid p") {
    s.p = 1.0;
    CHECK(error_code([&] { gen_2dim(s); }) == ErrorCode::InvalidArgument);
    s.p = 0.4;
    CHECK(error_code([&] { gen_2dim(s); }) == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("geometric task margins") {
  const auto d = gen_geometric_2d(0.1, 2.0, 3, 2, 1.5);
  REQUIRE(d.size() == 5);
  const auto g = split_groups(d);
  CHECK(g.majority == IndexList{0, 1, 2});
  for (auto i : g.majority) CHECK(d[i].x_inv(0) * d[i].y == doctest::Approx(0.1));
  for (auto i : g.minority) CHECK(d[i].x_inv(0) * d[i].y == doctest::Approx(2.0));
  CHECK(error_code([] { gen_geometric_2d(0.0, 1.0, 1, 1, 1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("invariant point sources") {
  SUBCASE("gaussian keeps its margin along e0") {
    const auto inv = gen_gaussian_inv(50, 3, 0.5, 4);
    REQUIRE(inv.size() == 50);
    for (const auto& p : inv) {
      CHECK(p.x.size() == 3);
      CHECK(p.y * p.x(0) >= 0.5);
    }
  }
  SUBCASE("heavy tail margins lie in (0, 1]") {
    for (const auto& p : gen_heavy_tail_inv(200, 3)) {
      CHECK(p.y * p.x(0) > 0.0);
      CHECK(p.y * p.x(0) <= 1.0);
    }
  }
  SUBCASE("relu features are non-negative and reproducible") {
    const auto raw = gen_gaussian_inv(10, 2, 0.5, 0);
    const auto a = gen_random_relu_features(raw, 16, 9);
    const auto b = gen_random_relu_features(raw, 16, 9);
    const Matrix W = relu_projection(2, 16, 9);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].x.size() == 16);
      CHECK(a[i].x.minCoeff() >= 0.0);
      CHECK(a[i].x == b[i].x);
      CHECK((a[i].x - (W * raw[i].x).cwiseMax(0.0)).norm() == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("attach_spurious hits the requested group sizes") {
  GenSpec s;
  s.p = 0.75;
  s.B = 3.0;
  const auto d = attach_spurious(gen_gaussian_inv(40, 2, 0.5, 1), s);
  CHECK(d.size() == 40);
  CHECK(split_groups(d).majority.size() == 30);
  for (const auto& pt : d.points()) CHECK(std::abs(pt.x_sp(0)) == 3.0);
}

TEST_CASE("majority duplication") {
  GenSpec s;
  s.p = 0.5;
  const auto d = attach_spurious(gen_gaussian_inv(20, 2, 0.5, 2), s);
  const auto dup = duplicate_majority(d, 4.0, 11);
  const auto g = split_groups(dup);
  CHECK(g.minority.size() == 10);
  CHECK(g.majority.size() == 40);
  // originals stay in place; copies are appended
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(dup[i] == d[i]);
  CHECK(error_code([&] { duplicate_majority(dup, 2.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("high-dimensional spurious block") {
  const auto d = gen_highdim_spurious(30, 50, {0.8}, 1.0, 5);
  CHECK(d.size() == 30);
  CHECK(d.sp_dim() == 50);
  CHECK_FALSE(d.sp_two_valued());
  CHECK(d.sp_scale() == 1.0);
  CHECK(error_code([] { gen_highdim_spurious(10, 5, {0.5}, 1.0, 0); }) == ErrorCode::InvalidArgument);
  CHECK(error_code([] { gen_highdim_spurious(10, 5, {0.8, 0.9}, 1.0, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("breaker names round-trip") {
  for (auto k : {BreakerKind::UnstableInvariant, BreakerKind::CondDependent, BreakerKind::Nonorthogonal})
    CHECK(parse_breaker_kind(to_string(k)) == k);
  CHECK(error_code([] { parse_breaker_kind("nope"); }) == ErrorCode::InvalidArgument);
}
