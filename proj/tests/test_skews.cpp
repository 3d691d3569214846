#include <doctest.h>

#include <cmath>

#include "skewlab/skews.hpp"
#include "support.hpp"

using namespace skewlab;
using skewlab::testing::error_code;
using skewlab::testing::vec;

TEST_CASE("worked geometric instance") {
  const auto r = compute_skew_report(gen_geometric_2d(0.1, 2.0, 2, 2, 1.0));
  CHECK(r.v_maj == doctest::Approx(10.0));
  CHECK(r.v_min == doctest::Approx(0.5));
  CHECK(r.v_all == doctest::Approx(10.0));
  CHECK(r.kappa1 == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(r.kappa2 == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(r.kappa1_tilde == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(r.kappa2_tilde == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(r.c1 == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(r.c2 == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(r.lower_bound == doctest::Approx(0.541742430504416).epsilon(1e-9));
  CHECK(r.upper_bound == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(r.measured_Bwsp == doctest::Approx(19.0 / 21.0).epsilon(1e-9));
  CHECK(r.lb_precondition_met);
  CHECK(r.ub_precondition_met);
  CHECK(r.bounds_hold());
  CHECK(r.slack_lower == doctest::Approx(19.0 / 21.0 - 0.541742430504416).epsilon(1e-9));
  CHECK(r.slack_upper == doctest::Approx(10.0 - 19.0 / 21.0).epsilon(1e-9));
}

TEST_CASE("spurious scale enters the measured weight") {
  const auto r = compute_skew_report(gen_geometric_2d(0.2, 3.0, 4, 4, 2.0));
  CHECK(r.B == 2.0);
  CHECK(r.measured_Bwsp == doctest::Approx(2.0 * 0.4375).epsilon(1e-9));
}

TEST_CASE("missing minority gives a degenerate report") {
  const auto r = compute_skew_report(gen_geometric_2d(0.1, 2.0, 4, 0, 1.0));
  CHECK(r.missing_group);
  CHECK(std::isnan(r.kappa1));
  CHECK_FALSE(r.lb_precondition_met);
  CHECK_FALSE(r.ub_precondition_met);
}

TEST_CASE("report needs a two-valued spurious feature") {
  std::vector<LabeledPoint> pts;
  pts.emplace_back(vec({1.0}), vec({0.2}), 1);
  pts.emplace_back(vec({-1.0}), vec({0.4}), -1);
  const Dataset d(pts, 1.0, false);
  CHECK(error_code([&] { compute_skew_report(d); }).has_value());
}

TEST_CASE("norm growth on the 1/i construction") {
  InvSet inv;
  std::vector<std::size_t> sizes;
  for (int i = 1; i <= 8; ++i) {
    inv.push_back({vec({1.0 / i}), 1});
    inv.push_back({vec({-1.0 / i}), -1});
    sizes.push_back(static_cast<std::size_t>(2 * i));
  }
  const auto rows = norm_growth_curve(inv, sizes);
  REQUIRE(rows.size() == sizes.size());
  for (const auto& r : rows) {
    CHECK(r.v_norm == doctest::Approx(static_cast<double>(r.n / 2)).epsilon(1e-9));
    // margin 0 on the rest keeps the same minimiser here
    CHECK(r.v_tilde_norm >= r.v_norm - 1e-9);
  }
}

TEST_CASE("nested prefixes never shrink the norm") {
  const std::vector<std::size_t> sizes = {10, 20, 40, 80, 160};
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto rows = norm_growth_curve(gen_heavy_tail_inv(160, seed), sizes);
    for (std::size_t k = 1; k < rows.size(); ++k) CHECK(rows[k].v_norm >= rows[k - 1].v_norm * (1 - 1e-9));
    for (const auto& r : rows) CHECK(r.v_tilde_norm >= r.v_norm * (1 - 1e-9));
  }
}

TEST_CASE("high-dimensional proposition on a fully aligned block") {
  // every signed row equals (1, 1, ..., 1): w is that row / (1 + D), so ratio = sqrt(D)
  const auto d = gen_highdim_spurious(10, 16, {1.0}, 1.0, 0);
  const auto prop = verify_highdim_proposition(d, 0.2, 0.1);
  CHECK(prop.ratio == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(prop.threshold == doctest::Approx(0.4));
  CHECK(prop.passed);
  CHECK(prop.p_condition);
  CHECK(prop.d_required == doctest::Approx(7.587135646925732));
  CHECK(prop.d_condition);
}

TEST_CASE("high-dimensional proposition flags weak correlation") {
  const auto d = gen_highdim_spurious(50, 100, {0.6}, 1.0, 0);
  const auto prop = verify_highdim_proposition(d, 0.2, 0.1);
  CHECK_FALSE(prop.p_condition);  // needs p > 0.6
  CHECK(prop.threshold == doctest::Approx(1.0));
}
