#include "skewlab/verify.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <random>
#include <sstream>

#include "skewlab/cli.hpp"
#include "skewlab/dynamics.hpp"
#include "skewlab/skews.hpp"
#include "skewlab/taskgen.hpp"

namespace skewlab {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

// Collects the first failing observation; the detail line keeps the headline numbers.
struct Outcome {
  bool ok = true;
  std::string first_failure;
  std::string summary;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      first_failure = what;
    }
  }
  CriterionResult finish(int id, const char* title) const {
    CriterionResult r;
    r.id = id;
    r.title = title;
    r.passed = ok;
    r.detail = ok ? summary : first_failure + (summary.empty() ? "" : " | " + summary);
    return r;
  }
};

MarginProblem random_problem(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_dist(2, static_cast<int>(kOracleMaxPoints));
  std::uniform_int_distribution<int> d_dist(1, static_cast<int>(kOracleMaxDims));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> target(0.0, 2.0);
  std::bernoulli_distribution coin(0.5);

  const int n = n_dist(rng);
  const int d = d_dist(rng);
  const bool bias = coin(rng);
  Vector w_star(d);
  for (int k = 0; k < d; ++k) w_star(k) = normal(rng);
  const double b_star = bias ? 0.5 * normal(rng) : 0.0;

  MarginProblem prob;
  prob.signed_rows.resize(n, d);
  prob.labels.resize(n);
  prob.targets.resize(n);
  prob.mask = FeatureMask::Full;
  prob.bias = bias;
  prob.inv_dim = d;
  prob.sp_dim = 0;
  for (int i = 0; i < n; ++i) {
    Vector x(d);
    double score = 0;
    do {
      for (int k = 0; k < d; ++k) x(k) = normal(rng);
      score = w_star.dot(x) + b_star;
    } while (std::abs(score) < 0.05 * w_star.norm());
    const double y = score > 0 ? 1.0 : -1.0;
    prob.labels(i) = y;
    prob.signed_rows.row(i) = y * x.transpose();
    prob.targets(i) = target(rng);
  }
  return prob;
}

CriterionResult c1_qp_oracle() {
  Outcome o;
  const auto start = Clock::now();
  std::mt19937_64 rng(20240611);
  double worst = 0;
  for (int k = 0; k < 200; ++k) {
    const auto prob = random_problem(rng);
    const auto sol = solve_least_norm(prob);
    const auto ref = oracle_active_set(prob);
    const double err = ref.objective > 0 ? rel_err(sol.objective, ref.objective) : std::abs(sol.objective);
    worst = std::max(worst, err);
    o.require(err <= 1e-6, "instance " + std::to_string(k) + ": solver " + fmt(sol.objective, 12) + " vs oracle " +
                               fmt(ref.objective, 12));
  }
  const double secs = seconds_since(start);
  o.require(secs < 30.0, "runtime " + fmt(secs, 3) + " s exceeds 30 s");
  o.summary = "200 instances, worst relative gap " + fmt(worst, 3) + ", " + fmt(secs, 3) + " s";
  return o.finish(1, "QP oracle equivalence");
}

CriterionResult c2_worked_instance() {
  Outcome o;
  const auto d = gen_geometric_2d(0.1, 2.0, 2, 2, 1.0);
  const auto mm = max_margin(d, true);
  o.require(std::abs(mm.model.w_inv(0) - 20.0 / 21.0) <= 1e-4, "w_inv = " + fmt(mm.model.w_inv(0), 10));
  o.require(std::abs(mm.model.w_sp(0) - 19.0 / 21.0) <= 1e-4, "w_sp = " + fmt(mm.model.w_sp(0), 10));
  o.require(std::abs(mm.model.bias) <= 1e-4, "b = " + fmt(mm.model.bias));

  const auto r = compute_skew_report(d);
  const std::pair<const char*, double> kappas[] = {{"kappa1", r.kappa1}, {"kappa1_tilde", r.kappa1_tilde},
                                                   {"kappa2", r.kappa2}, {"kappa2_tilde", r.kappa2_tilde},
                                                   {"c1", r.c1},         {"c2", r.c2}};
  for (const auto& [name, v] : kappas) o.require(std::abs(v - 0.05) <= 1e-6, std::string(name) + " = " + fmt(v, 10));
  const double lb = 1.0 - 2.0 * std::sqrt(0.0525);
  o.require(std::abs(r.lower_bound - lb) <= 1e-4, "lower bound " + fmt(r.lower_bound));
  o.require(std::abs(r.upper_bound - 10.0) <= 1e-4, "upper bound " + fmt(r.upper_bound));
  o.require(std::abs(r.measured_Bwsp - 19.0 / 21.0) <= 1e-4, "measured B w_sp " + fmt(r.measured_Bwsp));
  o.require(r.lb_precondition_met && r.ub_precondition_met, "preconditions not met");
  o.require(r.lower_bound <= r.measured_Bwsp && r.measured_Bwsp <= r.upper_bound, "sandwich violated");
  o.summary = "w = (" + fmt(mm.model.w_inv(0)) + ", " + fmt(mm.model.w_sp(0)) + "), b = " + fmt(mm.model.bias, 3) +
              "; " + fmt(r.lower_bound, 5) + " <= " + fmt(r.measured_Bwsp, 5) + " <= " + fmt(r.upper_bound, 5);
  return o.finish(2, "worked geometric-skew instance");
}

CriterionResult c3_sandwich_sweep() {
  Outcome o;
  const auto start = Clock::now();
  const double maj[] = {0.05, 0.1, 0.2, 0.3, 0.5};
  const double mins[] = {1.0, 1.5, 2.0, 3.0, 5.0};
  const std::pair<std::size_t, std::size_t> sizes[] = {{2, 2}, {10, 2}, {50, 4}};
  int eligible = 0, held = 0;
  for (double a : maj)
    for (double m : mins)
      for (const auto& [n_maj, n_min] : sizes) {
        const auto r = compute_skew_report(gen_geometric_2d(a, m, n_maj, n_min, 1.0));
        if (!r.lb_precondition_met || !r.ub_precondition_met) continue;
        ++eligible;
        const bool ok = r.bounds_hold(kPreconditionSlop);
        held += ok;
        o.require(ok, "cell (" + fmt(a) + ", " + fmt(m) + ", " + std::to_string(n_maj) + ":" + std::to_string(n_min) +
                          "): " + fmt(r.lower_bound) + " <= " + fmt(r.measured_Bwsp) + " <= " + fmt(r.upper_bound) +
                          " fails");
      }
  const double secs = seconds_since(start);
  o.require(eligible > 0, "no grid cell met the preconditions");
  o.require(secs < 60.0, "runtime " + fmt(secs, 3) + " s exceeds 60 s");
  o.summary = std::to_string(held) + "/" + std::to_string(eligible) + " eligible cells of 75 hold, " + fmt(secs, 3) + " s";
  return o.finish(3, "sandwich sweep");
}

CriterionResult c4_balanced() {
  Outcome o;
  const auto sol = balanced_max_margin(gen_geometric_2d(0.1, 2.0, 2, 2, 1.0), 0.05);
  o.require(sol.converged, "balanced solve did not converge");
  o.require(std::abs(sol.model.w_sp(0)) <= 1e-6, "w_sp = " + fmt(sol.model.w_sp(0)));
  o.summary = "w_sp = " + fmt(sol.model.w_sp(0), 3) + ", w_inv = " + fmt(sol.model.w_inv(0));
  return o.finish(4, "balanced max-margin mitigation");
}

Dataset two_dim(double p, bool paired) {
  GenSpec s;
  s.n = 100;
  s.p = p;
  s.B = 1.0;
  s.pairing = paired;
  return gen_2dim(s);
}

CriterionResult c5_closed_form() {
  Outcome o;
  const auto start = Clock::now();
  DynSpec spec;
  spec.checkpoints = {0.01, 0.1, 1, 10, 100, 1e4};
  const auto traj = simulate(two_dim(0.9, false), spec);
  double worst = 0;
  for (const auto& r : traj.records) {
    const auto cf = closed_form_2dim_exp(0.9, r.t);
    const double e = std::max(rel_err(r.w_inv(0), cf.w_inv), rel_err(r.w_sp(0), cf.w_sp));
    worst = std::max(worst, e);
    o.require(e <= 1e-3, "t = " + fmt(r.t) + ": relative error " + fmt(e));
    if (r.t == 10) {
      o.require(rel_err(r.w_inv(0), 2.02148) <= 1e-3 && rel_err(r.w_sp(0), 0.92291) <= 1e-3,
                "t = 10 gives (" + fmt(r.w_inv(0), 8) + ", " + fmt(r.w_sp(0), 8) + ")");
    }
  }
  const double secs = seconds_since(start);
  o.require(secs < 10.0, "runtime " + fmt(secs, 3) + " s exceeds 10 s");
  o.summary = "worst relative error " + fmt(worst, 3) + ", t = 10 -> (" + fmt(traj.records[3].w_inv(0), 7) + ", " +
              fmt(traj.records[3].w_sp(0), 7) + "), " + fmt(secs, 3) + " s";
  return o.finish(5, "closed-form dynamics");
}

const double kInvariantPs[] = {0.5, 0.6, 0.75, 0.9};

Trajectory invariant_run(double p, Loss loss) {
  DynSpec spec;
  spec.loss = loss;
  spec.checkpoints = log_grid(1e-2, 1e6, 4);
  return simulate(two_dim(p, p == 0.5), spec);
}

CriterionResult c6_exp_invariants() {
  Outcome o;
  std::size_t checked = 0;
  for (double p : kInvariantPs) {
    const auto traj = invariant_run(p, Loss::Exponential);
    const double ceiling = fixed_point_exp(p, 1.0);
    const std::string tag = "p = " + fmt(p) + ", t = ";
    for (std::size_t k = 0; k < traj.records.size(); ++k) {
      const auto& r = traj.records[k];
      ++checked;
      o.require(r.w_sp(0) <= ceiling, tag + fmt(r.t) + ": w_sp " + fmt(r.w_sp(0), 12) + " above " + fmt(ceiling, 12));
      if (p == 0.5) o.require(r.w_sp(0) == 0.0, tag + fmt(r.t) + ": w_sp = " + fmt(r.w_sp(0)) + " not exactly 0");
      if (k == 0) continue;
      const auto& prev = traj.records[k - 1];
      o.require(r.w_sp(0) >= prev.w_sp(0), tag + fmt(r.t) + ": w_sp decreased");
      o.require(r.beta <= prev.beta, tag + fmt(r.t) + ": beta increased");
    }
  }
  o.summary = std::to_string(checked) + " checkpoints over p in {0.5, 0.6, 0.75, 0.9}, t in [1e-2, 1e6]";
  return o.finish(6, "exponential-loss invariants");
}

CriterionResult c7_logistic_invariants() {
  Outcome o;
  std::size_t checked = 0;
  double worst_excess = 0;
  for (double p : kInvariantPs) {
    const auto traj = invariant_run(p, Loss::Logistic);
    const std::string tag = "p = " + fmt(p) + ", t = ";
    for (const auto& r : traj.records) {
      ++checked;
      const double ceiling = logistic_sp_ceiling(p, r.t);
      worst_excess = std::max(worst_excess, r.w_sp(0) - ceiling);
      o.require(r.w_sp(0) >= 0, tag + fmt(r.t) + ": w_sp negative");
      o.require(r.w_inv(0) <= std::log1p(r.t), tag + fmt(r.t) + ": w_inv above ln(t+1)");
      o.require(r.w_sp(0) <= ceiling,
                tag + fmt(r.t) + ": w_sp " + fmt(r.w_sp(0)) + " above ceiling " + fmt(ceiling));
    }
  }
  o.summary = std::to_string(checked) + " checkpoints, largest w_sp excess over the ceiling " + fmt(worst_excess, 4);
  return o.finish(7, "logistic-loss invariants");
}

CriterionResult c8_fig5a() {
  Outcome o;
  const auto start = Clock::now();
  const double ps[] = {0.9, 0.75, 0.6, 0.5};
  std::vector<Dataset> data;
  for (double p : ps) {
    GenSpec s;
    s.n = 2048;
    s.p = p;
    data.push_back(gen_2dim(s));
  }
  int seeds_ok = 0;
  double max_half = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::vector<Trajectory> trajs;
    for (const auto& d : data) {
      DynSpec spec;
      spec.loss = Loss::Logistic;
      spec.mode = DynMode::Discrete;
      spec.lr = 1e-3;
      spec.batch_size = 32;
      spec.batch_seed = seed;
      spec.checkpoints = {10, 100, 1000};
      spec.compute_residual = false;
      trajs.push_back(simulate(d, spec));
    }
    bool ok = true;
    for (std::size_t k = 0; k < 3; ++k) {
      const double b9 = trajs[0].records[k].beta, b75 = trajs[1].records[k].beta;
      const double b6 = trajs[2].records[k].beta, b5 = trajs[3].records[k].beta;
      max_half = std::max(max_half, std::abs(b5));
      const bool ordered = b9 > b75 && b75 > b6 && b6 > b5;
      ok = ok && ordered && std::abs(b5) < 0.01;
      o.require(ordered, "seed " + std::to_string(seed) + ", epoch " + fmt(trajs[0].records[k].t) + ": ordering " +
                             fmt(b9) + ", " + fmt(b75) + ", " + fmt(b6) + ", " + fmt(b5));
      o.require(std::abs(b5) < 0.01, "seed " + std::to_string(seed) + ": |beta_0.5| = " + fmt(std::abs(b5)));
    }
    seeds_ok += ok;
  }
  const double secs = seconds_since(start);
  o.require(secs < 120.0, "runtime " + fmt(secs, 3) + " s exceeds 120 s");
  o.summary = std::to_string(seeds_ok) + "/5 seeds ordered, max |beta_0.5| = " + fmt(max_half, 3) + ", " +
              fmt(secs, 3) + " s";
  return o.finish(8, "minibatch skew ordering");
}

CriterionResult c9_duplication() {
  Outcome o;
  int seeds_ok = 0;
  double worst_mm = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    GenSpec s;
    s.p = 0.5;
    s.B = 1.0;
    s.seed = seed;
    s.pairing = true;
    const auto control = attach_spurious(gen_gaussian_inv(40, 2, 0.5, seed), s);
    const auto dup = duplicate_majority(control, 10.0, seed);

    DynSpec spec;
    spec.loss = Loss::Logistic;
    spec.mode = DynMode::Discrete;
    spec.lr = 0.1;
    spec.checkpoints = {10, 100, 1000};
    spec.compute_residual = false;
    const auto tc = simulate(control, spec);
    const auto td = simulate(dup, spec);
    bool ok = true;
    for (std::size_t k = 0; k < tc.records.size(); ++k) {
      const bool larger = td.records[k].beta > tc.records[k].beta;
      ok = ok && larger;
      o.require(larger, "seed " + std::to_string(seed) + ", epoch " + fmt(tc.records[k].t) + ": beta " +
                            fmt(td.records[k].beta) + " vs control " + fmt(tc.records[k].beta));
    }

    const auto mc = max_margin(control, true);
    const auto md = max_margin(dup, true);
    const double diff = std::max({(mc.model.w_inv - md.model.w_inv).cwiseAbs().maxCoeff(),
                                  (mc.model.w_sp - md.model.w_sp).cwiseAbs().maxCoeff(),
                                  std::abs(mc.model.bias - md.model.bias)});
    worst_mm = std::max(worst_mm, diff);
    ok = ok && diff <= 1e-6;
    o.require(diff <= 1e-6, "seed " + std::to_string(seed) + ": max-margin solutions differ by " + fmt(diff));
    seeds_ok += ok;
  }
  o.summary = std::to_string(seeds_ok) + "/5 seeds, max-margin gap " + fmt(worst_mm, 3);
  return o.finish(9, "statistical-skew isolation");
}

CriterionResult c10_norm_growth() {
  Outcome o;
  std::vector<std::size_t> sizes;
  for (std::size_t n = 10; n <= 200; n += 10) sizes.push_back(n);
  int monotone = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    NormCurveOptions opts;
    opts.with_tilde = false;
    const auto rows = norm_growth_curve(gen_heavy_tail_inv(200, seed), sizes, opts);
    bool ok = true;
    // equal active sets give equal norms up to rounding
    for (std::size_t k = 1; k < rows.size(); ++k) ok = ok && rows[k].v_norm >= rows[k - 1].v_norm * (1 - 1e-9);
    monotone += ok;
    o.require(ok, "seed " + std::to_string(seed) + ": curve decreased");
  }

  InvSet inv;
  std::vector<std::size_t> pair_sizes;
  for (int i = 1; i <= 20; ++i) {
    inv.push_back({Vector::Constant(1, 1.0 / i), 1});
    inv.push_back({Vector::Constant(1, -1.0 / i), -1});
    pair_sizes.push_back(static_cast<std::size_t>(2 * i));
  }
  NormCurveOptions opts;
  opts.with_tilde = false;
  double worst = 0;
  for (const auto& r : norm_growth_curve(inv, pair_sizes, opts)) {
    const double expect = static_cast<double>(r.n / 2);
    worst = std::max(worst, std::abs(r.v_norm - expect));
    o.require(std::abs(r.v_norm - expect) <= 1e-6, "1/i construction at n = " + std::to_string(r.n) + ": " +
                                                       fmt(r.v_norm, 10) + " != " + fmt(expect));
  }
  o.summary = std::to_string(monotone) + "/20 heavy-tail curves nondecreasing, 1/i construction max error " +
              fmt(worst, 3);
  return o.finish(10, "norm growth");
}

CriterionResult c11_highdim() {
  Outcome o;
  int passes = 0;
  double lo = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto d = gen_highdim_spurious(50, 100, {0.6}, 1.0, seed);
    const auto prop = verify_highdim_proposition(d, 0.2, 0.1);
    passes += prop.passed;
    lo = std::min(lo, prop.ratio);
  }
  o.require(passes >= 18, std::to_string(passes) + "/20 seeds cleared the threshold");
  o.summary = std::to_string(passes) + "/20 seeds with ratio >= 1.0, smallest ratio " + fmt(lo, 4);
  return o.finish(11, "high-dimensional proposition");
}

CriterionResult c12_gradient() {
  Outcome o;
  GenSpec s;
  s.p = 0.8;
  const auto d = attach_spurious(gen_gaussian_inv(20, 3, 0.5, 7), s);
  std::mt19937_64 rng(99);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double h = 1e-6;
  double worst = 0;
  for (Loss loss : {Loss::Exponential, Loss::Logistic}) {
    const LinearObjective f(d, loss);
    for (int state = 0; state < 50; ++state) {
      Vector w(f.dim());
      for (Eigen::Index k = 0; k < w.size(); ++k) w(k) = normal(rng);
      const Vector g = f.gradient(w);
      Vector fd(f.dim());
      for (Eigen::Index k = 0; k < w.size(); ++k) {
        Vector wp = w, wm = w;
        wp(k) += h;
        wm(k) -= h;
        fd(k) = (f.value(wp) - f.value(wm)) / (2 * h);
      }
      const double err = (g - fd).cwiseAbs().maxCoeff() / g.cwiseAbs().maxCoeff();
      worst = std::max(worst, err);
      o.require(err <= 1e-5, std::string(to_string(loss)) + " state " + std::to_string(state) + ": relative error " +
                                 fmt(err));
    }
  }
  o.summary = "100 states, worst relative error " + fmt(worst, 3);
  return o.finish(12, "gradient check");
}

std::map<std::string, std::string> read_tree(const std::filesystem::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    files[std::filesystem::relative(e.path(), root).generic_string()] =
        std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return files;
}

CriterionResult c13_determinism() {
  Outcome o;
  namespace fs = std::filesystem;
  std::random_device rd;
  const fs::path base = fs::temp_directory_path() / ("skewlab-determinism-" + std::to_string(rd()));
  fs::create_directories(base);

  const std::string config = R"(kind = "dynamics"
emit_svg = true
jobs = 2

[generator]
name = "2dim"
n = 256

[dynamics]
loss = "logistic"
mode = "discrete"
lr = 0.01
batch_size = 16
batch_seed = 5
t_min = 1
t_max = 50
per_decade = 3
bounds = "logistic"

[sweep]
p = [0.5, 0.75, 0.9]
seeds = [0, 1]
)";
  {
    std::ofstream(base / "dyn.toml") << config;
  }

  const std::vector<std::pair<std::string, std::vector<std::string>>> runs = {
      {"gen", {"gen", "--generator", "2dim", "--n", "64", "--p", "0.6", "0.9", "--seed", "3", "--jobs", "2"}},
      {"gen_attach", {"gen", "--generator", "attach", "--inv-source", "gaussian", "--n", "30", "--p", "0.7",
                      "--sampled", "--seed", "4"}},
      {"maxmargin", {"maxmargin", "--generator", "geometric", "--duals"}},
      {"skews", {"skews", "--generator", "geometric", "--p", "0.9"}},
      {"normcurve", {"normcurve", "--generator", "attach", "--inv-source", "heavy_tail", "--n", "60", "--sizes", "10",
                     "20", "40", "60", "--seed", "1", "--svg"}},
      {"flow", {"dynamics", "--generator", "2dim", "--n", "40", "--p", "0.6", "0.9", "--t-max", "100",
                "--per-decade", "2", "--bounds", "skew_free", "--jobs", "2", "--svg"}},
      {"config", {"dynamics", "--config", (base / "dyn.toml").string()}},
  };

  std::size_t compared = 0;
  for (const char* side : {"a", "b"}) {
    for (const auto& [name, args] : runs) {
      auto full = args;
      full.push_back("--out");
      full.push_back((base / side / name).string());
      std::ostringstream out, err;
      const int code = run_cli(full, out, err);
      o.require(code == 0, name + " exited with " + std::to_string(code) + ": " + err.str());
    }
    std::ostringstream out, err;
    const int code = run_cli({"report", "--input", (base / side / "config").string(), "--out",
                              (base / side / "report").string(), "--svg"},
                             out, err);
    o.require(code == 0, "report exited with " + std::to_string(code) + ": " + err.str());
  }
  const auto a = read_tree(base / "a");
  const auto b = read_tree(base / "b");
  o.require(a.size() == b.size(), "runs wrote different file sets");
  std::size_t csvs = 0;
  for (const auto& [name, content] : a) {
    const auto it = b.find(name);
    const bool same = it != b.end() && it->second == content;
    o.require(same, name + " differs between runs");
    ++compared;
    if (fs::path(name).extension() == ".csv") ++csvs;
  }
  o.require(csvs > 0, "no CSV output produced");
  std::error_code ec;
  fs::remove_all(base, ec);
  o.summary = std::to_string(compared) + " files (" + std::to_string(csvs) + " CSV) byte-identical across two runs";
  return o.finish(13, "CLI determinism");
}

}  // namespace

CriterionResult run_criterion(int id) {
  static const std::function<CriterionResult()> table[] = {
      c1_qp_oracle,    c2_worked_instance, c3_sandwich_sweep, c4_balanced,     c5_closed_form,
      c6_exp_invariants, c7_logistic_invariants, c8_fig5a,   c9_duplication,  c10_norm_growth,
      c11_highdim,     c12_gradient,       c13_determinism};
  if (id < 1 || id > kCriterionCount) throw Error(ErrorCode::InvalidArgument, "no criterion " + std::to_string(id));
  const auto start = Clock::now();
  CriterionResult r;
  try {
    r = table[id - 1]();
  } catch (const std::exception& e) {
    r.id = id;
    r.title = "criterion " + std::to_string(id);
    r.passed = false;
    r.detail = std::string("threw ") + e.what();
  }
  r.seconds = seconds_since(start);
  return r;
}

std::vector<CriterionResult> run_criteria(const std::vector<int>& ids) {
  std::vector<CriterionResult> out;
  if (ids.empty()) {
    for (int id = 1; id <= kCriterionCount; ++id) out.push_back(run_criterion(id));
  } else {
    for (int id : ids) out.push_back(run_criterion(id));
  }
  return out;
}

std::string format_criterion(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.passed ? "PASS" : "FAIL") << ' ' << (r.id < 10 ? " " : "") << r.id << ' ' << r.title << ": " << r.detail;
  return os.str();
}

}  // namespace skewlab
