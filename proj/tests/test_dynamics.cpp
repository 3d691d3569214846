#include <doctest.h>

#include <cmath>

#include "skewlab/dynamics.hpp"
#include "skewlab/taskgen.hpp"
#include "support.hpp"

using namespace skewlab;
using skewlab::testing::error_code;
using skewlab::testing::vec;

namespace {

Dataset two_dim(double p, double B = 1.0, bool paired = false) {
  GenSpec s;
  s.n = 100;
  s.p = p;
  s.B = B;
  s.pairing = paired;
  return gen_2dim(s);
}

DynSpec flow_at(std::vector<double> ts, Loss loss) {
  DynSpec spec;
  spec.loss = loss;
  spec.checkpoints = std::move(ts);
  return spec;
}

}  // namespace

TEST_CASE("closed form for the two-dimensional exponential flow") {
  const auto cf = closed_form_2dim_exp(0.9, 10.0);
  CHECK(cf.w_inv == doctest::Approx(2.0215256).epsilon(1e-7));
  CHECK(cf.w_sp == doctest::Approx(0.9229133).epsilon(1e-7));

  const auto traj = simulate(two_dim(0.9), flow_at({0.5, 10.0, 1000.0}, Loss::Exponential));
  REQUIRE(traj.records.size() == 3);
  for (const auto& r : traj.records) {
    const auto ref = closed_form_2dim_exp(0.9, r.t);
    CHECK(r.w_inv(0) == doctest::Approx(ref.w_inv).epsilon(1e-6));
    CHECK(r.w_sp(0) == doctest::Approx(ref.w_sp).epsilon(1e-6));
  }
}

// References from an independent DOP853 integration at rtol 1e-12.
TEST_CASE("logistic flow matches a reference integration") {
  const auto a = simulate(two_dim(0.75), flow_at({10.0}, Loss::Logistic)).records.back();
  CHECK(a.w_inv(0) == doctest::Approx(2.049460008837).epsilon(1e-6));
  CHECK(a.w_sp(0) == doctest::Approx(0.546124181843).epsilon(1e-6));
  const auto b = simulate(two_dim(0.9), flow_at({100.0}, Loss::Logistic)).records.back();
  CHECK(b.w_inv(0) == doctest::Approx(4.032823149151).epsilon(1e-6));
  CHECK(b.w_sp(0) == doctest::Approx(1.136697197937).epsilon(1e-6));
}

TEST_CASE("exponential flow with B = 2 stays under the fixed point") {
  CHECK(fixed_point_exp(0.75, 2.0) == doctest::Approx(0.27465307216702745));
  const auto r = simulate(two_dim(0.75, 2.0), flow_at({50.0}, Loss::Exponential)).records.back();
  CHECK(r.w_inv(0) == doctest::Approx(3.791497345011).epsilon(1e-6));
  CHECK(r.w_sp(0) == doctest::Approx(0.274652997367).epsilon(1e-6));
  CHECK(r.w_sp(0) <= fixed_point_exp(0.75, 2.0));
}

TEST_CASE("paired balanced data keeps w_sp exactly zero") {
  for (Loss loss : {Loss::Exponential, Loss::Logistic}) {
    const auto traj = simulate(two_dim(0.5, 1.0, true), flow_at({1.0, 100.0, 1e4}, loss));
    for (const auto& r : traj.records) CHECK(r.w_sp(0) == 0.0);
  }
}

TEST_CASE("envelope constants") {
  CHECK(skew_free_lower_numerator(0.9, 1.0, 1.0) == doctest::Approx(0.23180161405732438));
  const auto lg = logistic_2d_bounds(0.9, 1.0);
  CHECK(lg.lower == doctest::Approx(0.3684827970831031));
  CHECK(lg.upper == doctest::Approx(2.709511291351455));
  const auto sf = skew_free_bounds(0.9, 1.0, 1.0, std::exp(1.0) - 1.0);
  CHECK(sf.lower == doctest::Approx(0.23180161405732438 / 2.0));
  CHECK(sf.upper == doctest::Approx(std::log(9.0)));
  CHECK(logistic_sp_ceiling(0.6, 0.0) == 0.0);
}

TEST_CASE("initial gradient direction") {
  const Vector g = initial_gradient_direction(two_dim(0.9));
  CHECK(g(0) == doctest::Approx(1.0));
  CHECK(g(1) == doctest::Approx(0.8));
}

TEST_CASE("log grid") {
  const auto g = log_grid(1e-2, 1e2, 2);
  REQUIRE(g.size() == 9);
  CHECK(g.front() == 1e-2);
  CHECK(g.back() == 1e2);
  CHECK(g[2] == doctest::Approx(0.1));
  CHECK(g[3] == doctest::Approx(std::sqrt(10.0) / 10.0));
}

TEST_CASE("objective gradient matches central differences") {
  GenSpec s;
  s.p = 0.7;
  const auto d = attach_spurious(gen_gaussian_inv(12, 2, 0.5, 3), s);
  const Vector w = vec({0.3, -0.2, 0.5});
  for (Loss loss : {Loss::Exponential, Loss::Logistic}) {
    const LinearObjective f(d, loss, 0.1);
    const Vector g = f.gradient(w);
    for (Eigen::Index k = 0; k < w.size(); ++k) {
      Vector e = Vector::Zero(w.size());
      e(k) = 1e-6;
      // value() excludes the decay term; add its derivative by hand
      const double fd = (f.value(w + e) - f.value(w - e)) / 2e-6 + 0.1 * w(k);
      CHECK(g(k) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("discrete descent is reproducible per batch seed") {
  DynSpec spec;
  spec.mode = DynMode::Discrete;
  spec.loss = Loss::Logistic;
  spec.lr = 0.05;
  spec.batch_size = 8;
  spec.checkpoints = {1, 5};
  const auto d = two_dim(0.75);
  const auto a = simulate(d, spec);
  const auto b = simulate(d, spec);
  spec.batch_seed = 3;
  const auto c = simulate(d, spec);
  REQUIRE(a.records.size() == 2);
  CHECK(a.records[1].w_sp == b.records[1].w_sp);
  CHECK(a.records[1].w_inv == b.records[1].w_inv);
  CHECK_FALSE(a.records[1].w_sp == c.records[1].w_sp);
}

TEST_CASE("dynamics settings validation") {
  DynSpec spec;
  spec.mode = DynMode::Discrete;
  spec.checkpoints = {1.5};
  CHECK(error_code([&] { spec.validate(); }) == ErrorCode::InvalidArgument);
  CHECK(parse_dyn_mode("flow") == DynMode::Flow);
  CHECK(error_code([] { parse_dyn_mode("euler"); }) == ErrorCode::InvalidArgument);
  CHECK(parse_loss("logistic") == Loss::Logistic);
}

TEST_CASE("envelope check keeps rows from t0 on") {
  const auto d = two_dim(0.9);
  const auto traj = simulate(d, flow_at(log_grid(1e-2, 1e4, 2), Loss::Logistic));
  const auto chk = check_envelope(d, traj, EnvelopeKind::Logistic2d, 1.0);
  REQUIRE_FALSE(chk.rows.empty());
  CHECK(chk.rows.front().t >= 1.0);
  CHECK(chk.rows.size() == 9);
}
