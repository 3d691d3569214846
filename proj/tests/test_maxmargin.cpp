#include <doctest.h>

#include <random>

#include "skewlab/maxmargin.hpp"
#include "skewlab/taskgen.hpp"
#include "support.hpp"

using namespace skewlab;
using skewlab::testing::error_code;
using skewlab::testing::vec;

namespace {

// Reference values below come from an interior-point QP solve (tolerance 1e-12).

Dataset fixed_3d() {
  const double rows[6][3] = {{1.0, 2.0, 0.5},   {2.0, 0.5, -1.0},  {0.5, 1.5, 2.0},
                             {-1.0, -0.5, 0.3}, {-2.0, 1.0, -0.5}, {-0.3, -2.0, -1.0}};
  std::vector<LabeledPoint> pts;
  for (int i = 0; i < 6; ++i)
    pts.emplace_back(vec({rows[i][0], rows[i][1], rows[i][2]}), vec({0.0}), i < 3 ? 1 : -1);
  return Dataset(pts, 1.0, false);
}

IndexList all_indices(const Dataset& d) {
  IndexList idx(d.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return idx;
}

}  // namespace

TEST_CASE("geometric instances match the reference QP") {
  SUBCASE("10:2 at B = 1") {
    const auto d = gen_geometric_2d(0.3, 1.5, 10, 2, 1.0);
    const auto s = max_margin(d, true);
    CHECK(s.converged);
    CHECK(s.model.w_inv(0) == doctest::Approx(1.111111111111).epsilon(1e-9));
    CHECK(s.model.w_sp(0) == doctest::Approx(0.666666666667).epsilon(1e-9));
    CHECK(s.model.bias == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(v_norm(d, all_indices(d)) == doctest::Approx(3.333333333334).epsilon(1e-9));
  }
  SUBCASE("4:4 at B = 2") {
    const auto d = gen_geometric_2d(0.2, 3.0, 4, 4, 2.0);
    const auto s = max_margin(d, true);
    CHECK(s.model.w_inv(0) == doctest::Approx(0.625).epsilon(1e-9));
    CHECK(s.model.w_sp(0) == doctest::Approx(0.4375).epsilon(1e-9));
    CHECK(v_norm(d, all_indices(d)) == doctest::Approx(5.0).epsilon(1e-9));
  }
}

TEST_CASE("three-dimensional problem with and without bias") {
  const auto d = fixed_3d();
  const auto with_b = solve_least_norm(MarginProblem::from(d, FeatureMask::InvOnly, true));
  CHECK(with_b.converged);
  CHECK(with_b.objective == doctest::Approx(0.2770161404302655).epsilon(1e-8));
  CHECK(with_b.model.bias == doctest::Approx(-0.24035390225340636).epsilon(1e-7));
  CHECK((with_b.model.w_inv - vec({0.580037877721, 0.444356502806, 0.141900104592})).norm() < 1e-8);

  const auto no_b = solve_least_norm(MarginProblem::from(d, FeatureMask::InvOnly, false));
  CHECK(no_b.objective == doctest::Approx(0.39457392924374135).epsilon(1e-8));
  CHECK(no_b.model.bias == 0.0);
  CHECK((no_b.model.w_inv - vec({0.748898678416, 0.475770925107, -0.044052863434})).norm() < 1e-8);

  // the exhaustive oracle agrees on both
  CHECK(oracle_active_set(MarginProblem::from(d, FeatureMask::InvOnly, true)).objective ==
        doctest::Approx(with_b.objective).epsilon(1e-10));
  CHECK(oracle_active_set(MarginProblem::from(d, FeatureMask::InvOnly, false)).objective ==
        doctest::Approx(no_b.objective).epsilon(1e-10));
}

TEST_CASE("kkt residual certifies the solution") {
  const auto prob = MarginProblem::from(fixed_3d(), FeatureMask::InvOnly, true);
  const auto s = solve_least_norm(prob);
  CHECK(s.kkt_residual <= 1e-8);
  CHECK(kkt_residual(prob, s.model, s.duals) == doctest::Approx(s.kkt_residual));
  auto shifted = s.model;
  shifted.w_inv *= 0.9;  // loses feasibility
  CHECK(kkt_residual(prob, shifted, s.duals) > 1e-3);
}

TEST_CASE("infeasible problems report NotSeparable") {
  std::vector<LabeledPoint> pts;
  pts.emplace_back(vec({1.0}), vec({1.0}), 1);
  pts.emplace_back(vec({1.0}), vec({1.0}), -1);
  const Dataset d(pts, 1.0, true);
  CHECK(error_code([&] { max_margin(d, true); }) == ErrorCode::NotSeparable);
  CHECK(error_code([&] { max_margin(d, false); }) == ErrorCode::NotSeparable);
}

TEST_CASE("single-class data is met by the bias alone") {
  std::vector<LabeledPoint> pts;
  pts.emplace_back(vec({1.0}), vec({1.0}), 1);
  pts.emplace_back(vec({3.0}), vec({1.0}), 1);
  const auto s = max_margin(Dataset(pts, 1.0, true), true);
  CHECK(s.model.norm() == 0.0);
  CHECK(s.model.bias == 1.0);
}

TEST_CASE("target validation") {
  const auto d = fixed_3d();
  CHECK(error_code([&] { MarginProblem::from(d, FeatureMask::Full, true, Vector::Ones(5)); }) ==
        ErrorCode::InvalidArgument);
  CHECK(error_code([&] { MarginProblem::from(d, FeatureMask::Full, true, -Vector::Ones(6)); }) ==
        ErrorCode::InvalidArgument);
  const auto zero = solve_least_norm(MarginProblem::from(d, FeatureMask::Full, true, Vector::Zero(6)));
  CHECK(zero.objective == 0.0);
}

TEST_CASE("balanced targets remove the spurious weight") {
  // minority targets 1/c match the inv-only margins when c is the margin ratio
  const auto s = balanced_max_margin(gen_geometric_2d(0.2, 1.5, 4, 2, 1.0), 0.2 / 1.5);
  CHECK(s.converged);
  CHECK(std::abs(s.model.w_sp(0)) <= 1e-6);
  CHECK(s.model.w_inv(0) == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("v and v-tilde respect constraint nesting") {
  const auto d = gen_geometric_2d(0.3, 1.5, 10, 2, 1.0);
  const IndexList minority = {10, 11};
  const double v_min = v_norm(d, minority);
  const double vt_min = v_tilde_norm(d, minority);
  const double v_all = v_norm(d, all_indices(d));
  CHECK(v_min == doctest::Approx(1.0 / 1.5));
  CHECK(v_min <= vt_min + 1e-12);
  CHECK(vt_min <= v_all + 1e-12);
}

TEST_CASE("random problems agree with the oracle") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g;
  int checked = 0;
  for (int k = 0; k < 50; ++k) {
    MarginProblem prob;
    const int n = 8, dim = 3;
    prob.signed_rows = Matrix(n, dim);
    prob.labels = Vector(n);
    for (int i = 0; i < n; ++i) {
      prob.labels(i) = i % 2 ? -1.0 : 1.0;
      for (int j = 0; j < dim; ++j) prob.signed_rows(i, j) = g(rng);
      prob.signed_rows(i, 0) = std::abs(prob.signed_rows(i, 0)) + 0.2;
    }
    prob.targets = Vector::Ones(n);
    prob.bias = k % 2 == 0;
    prob.inv_dim = dim;
    const auto s = solve_least_norm(prob);
    const auto o = oracle_active_set(prob);
    CHECK(s.objective == doctest::Approx(o.objective).epsilon(1e-8));
    ++checked;
  }
  CHECK(checked == 50);
}
