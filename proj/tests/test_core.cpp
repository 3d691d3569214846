#include <doctest.h>

#include "skewlab/core.hpp"
#include "skewlab/taskgen.hpp"
#include "support.hpp"

using namespace skewlab;
using skewlab::testing::error_code;
using skewlab::testing::vec;

namespace {

Dataset four_points(double B = 1.0) {
  std::vector<LabeledPoint> pts;
  pts.emplace_back(vec({1.0}), vec({B}), 1);
  pts.emplace_back(vec({-1.0}), vec({-B}), -1);
  pts.emplace_back(vec({1.0}), vec({B}), 1);
  pts.emplace_back(vec({2.0}), vec({-B}), 1);
  return Dataset(pts, B, true);
}

}  // namespace

TEST_CASE("dataset rejects malformed input") {
  CHECK(error_code([] { LabeledPoint(vec({1.0}), vec({1.0}), 0); }) == ErrorCode::InvalidArgument);
  CHECK(error_code([] { Dataset({}, 1.0, true); }) == ErrorCode::InvalidArgument);
  CHECK(error_code([] {
          Dataset({LabeledPoint(vec({1.0}), vec({1.0}), 1)}, 0.0, true);
        }) == ErrorCode::InvalidArgument);
  CHECK(error_code([] {
          Dataset({LabeledPoint(vec({1.0}), vec({1.0}), 1), LabeledPoint(vec({1.0, 2.0}), vec({1.0}), 1)}, 1.0, true);
        }) == ErrorCode::InvalidArgument);
  CHECK(error_code([] {
          Dataset({LabeledPoint(vec({NAN}), vec({1.0}), 1)}, 1.0, true);
        }) == ErrorCode::InvalidArgument);
  // two-valued data must sit on {-B, +B}
  CHECK(error_code([] {
          Dataset({LabeledPoint(vec({1.0}), vec({0.5}), 1)}, 1.0, true);
        }) == ErrorCode::InvalidArgument);
  CHECK_NOTHROW(Dataset({LabeledPoint(vec({1.0}), vec({0.5}), 1)}, 1.0, false));
}

TEST_CASE("subset keeps order and allows repeats") {
  const auto d = four_points();
  const auto s = d.subset({3, 0, 3});
  REQUIRE(s.size() == 3);
  CHECK(s[0] == d[3]);
  CHECK(s[1] == d[0]);
  CHECK(s[2] == d[3]);
  CHECK(error_code([&] { d.subset({4}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("group split follows the sign of x_sp * y") {
  const auto d = four_points(2.0);
  const auto g = split_groups(d);
  CHECK(g.majority == IndexList{0, 1, 2});
  CHECK(g.minority == IndexList{3});
  CHECK(empirical_p(d) == doctest::Approx(0.75));
}

TEST_CASE("design matrix and features respect the mask") {
  const auto d = four_points(2.0);
  const Matrix full = design_matrix(d, FeatureMask::Full);
  const Matrix inv = design_matrix(d, FeatureMask::InvOnly);
  REQUIRE(full.cols() == 2);
  REQUIRE(inv.cols() == 1);
  CHECK(full(3, 0) == 2.0);
  CHECK(full(3, 1) == -2.0);
  CHECK(inv(1, 0) == -1.0);
  CHECK(features(d[3], FeatureMask::Full) == vec({2.0, -2.0}));
  CHECK(labels(d) == vec({1, -1, 1, 1}));
}

TEST_CASE("easy-task validation") {
  SUBCASE("generated task passes every constraint") {
    const auto r = validate_easy_task(gen_geometric_2d(0.1, 2.0, 2, 2, 1.0));
    CHECK(r.all());
    CHECK(r.inv_margin == doctest::Approx(0.1));
  }
  SUBCASE("inseparable invariant block fails c1") {
    std::vector<LabeledPoint> pts;
    pts.emplace_back(vec({1.0}), vec({1.0}), 1);
    pts.emplace_back(vec({1.0}), vec({-1.0}), -1);
    const auto r = validate_easy_task(Dataset(pts, 1.0, true));
    CHECK_FALSE(r.c1.ok);
    CHECK(r.c4.ok);
    CHECK(r.inv_margin == 0.0);
  }
  SUBCASE("continuous spurious feature fails c4") {
    std::vector<LabeledPoint> pts;
    pts.emplace_back(vec({1.0}), vec({0.3}), 1);
    pts.emplace_back(vec({-1.0}), vec({-0.7}), -1);
    const auto r = validate_easy_task(Dataset(pts, 1.0, false));
    CHECK(r.c1.ok);
    CHECK_FALSE(r.c4.ok);
  }
  SUBCASE("each breaker flips its own provenance flag") {
    BreakerParams bp;
    const auto a = validate_easy_task(gen_constraint_breakers(BreakerKind::UnstableInvariant, bp));
    const auto b = validate_easy_task(gen_constraint_breakers(BreakerKind::CondDependent, bp));
    const auto c = validate_easy_task(gen_constraint_breakers(BreakerKind::Nonorthogonal, bp));
    CHECK_FALSE(a.c2.ok);
    CHECK(a.c3.ok);
    CHECK(a.c5.ok);
    CHECK(b.c2.ok);
    CHECK_FALSE(b.c3.ok);
    CHECK(b.c5.ok);
    CHECK(c.c2.ok);
    CHECK(c.c3.ok);
    CHECK_FALSE(c.c5.ok);
  }
}
