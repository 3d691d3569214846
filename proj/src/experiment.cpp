#include "skewlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "skewlab/dataset_io.hpp"
#include "skewlab/ingest.hpp"
#include "skewlab/svg.hpp"
#include "skewlab/verify.hpp"

namespace skewlab {

InvSet build_inv_points(const GeneratorConfig& g, std::size_t n, std::uint64_t seed) {
  InvSet pts;
  if (g.inv_source == "gaussian") {
    pts = gen_gaussian_inv(n, g.inv_dim, g.inv_margin, seed);
  } else if (g.inv_source == "heavy_tail") {
    pts = gen_heavy_tail_inv(n, seed);
  } else if (g.inv_source == "idx") {
    pts = binarize_labels(parse_idx(g.idx_images, g.idx_labels));
    if (n > 0 && n < pts.size()) pts.resize(n);
  } else if (g.inv_source == "tabular") {
    pts = load_csv_tabular(g.tabular_path, g.tabular_label, true).points;
    if (n > 0 && n < pts.size()) pts.resize(n);
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown inv_source '" + g.inv_source + "'");
  }
  if (g.relu_dim > 0) pts = gen_random_relu_features(pts, g.relu_dim, splitmix64(seed));
  return pts;
}

Dataset build_dataset(const GeneratorConfig& g, double p, double B, std::uint64_t seed) {
  GenSpec spec = g.spec;
  spec.p = p;
  spec.B = B;
  spec.seed = seed;
  const std::string& name = spec.generator;
  std::optional<Dataset> d;
  if (name == "2dim") {
    d = gen_2dim(spec);
  } else if (name == "geometric") {
    d = gen_geometric_2d(g.maj_margin, g.min_margin, g.n_maj, g.n_min, B);
  } else if (name == "highdim") {
    d = gen_highdim_spurious(spec.n, g.D, {p}, g.inv_margin, seed);
  } else if (name == "breaker") {
    BreakerParams bp;
    bp.n = spec.n;
    bp.p = p;
    bp.seed = seed;
    bp.test_split = g.test_split;
    d = gen_constraint_breakers(parse_breaker_kind(g.breaker), bp);
  } else if (name == "attach") {
    d = attach_spurious(build_inv_points(g, spec.n, seed), spec);
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown generator '" + name + "'");
  }
  if (g.duplicate_ratio > 0) d = duplicate_majority(*d, g.duplicate_ratio, seed);
  return *d;
}

std::vector<double> resolve_checkpoints(const DynamicsConfig& dyn) {
  if (!dyn.spec.checkpoints.empty()) return dyn.spec.checkpoints;
  auto grid = log_grid(dyn.t_min, dyn.t_max, dyn.per_decade);
  if (dyn.spec.mode == DynMode::Discrete) {
    for (auto& t : grid) t = std::max(1.0, std::round(t));
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  }
  return grid;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream os;
  os << "t,loss,w_inv_norm,w_sp,beta,beta_2d,residual_norm\n";
  for (const auto& r : traj.records) {
    os << format_double(r.t) << ',' << format_double(r.loss) << ',' << format_double(r.w_inv.norm()) << ','
       << format_double(r.w_sp_scalar) << ',' << format_double(r.beta) << ',' << format_double(r.beta_2d) << ','
       << format_double(r.residual_norm) << '\n';
  }
  return os.str();
}

namespace {

struct Cell {
  std::string tag;
  double p = 0, B = 1;
  std::uint64_t seed = 0;
};

struct CellOutput {
  std::vector<std::pair<std::string, std::string>> files;  // name, content
  std::vector<std::string> rows;
  std::vector<SvgSeries> series;
  std::string text;
  std::string error;
};

std::string join(const Vector& v) {
  std::string s;
  for (Eigen::Index k = 0; k < v.size(); ++k) s += (k ? ";" : "") + format_double(v(k));
  return s;
}

std::string b(bool v) { return v ? "true" : "false"; }

std::string model_text(const QpSolution& sol) {
  std::ostringstream os;
  os << "w_inv=" << join(sol.model.w_inv) << '\n'
     << "w_sp=" << join(sol.model.w_sp) << '\n'
     << "bias=" << format_double(sol.model.bias) << '\n'
     << "norm=" << format_double(sol.model.norm()) << '\n'
     << "objective=" << format_double(sol.objective) << '\n'
     << "kkt_residual=" << format_double(sol.kkt_residual) << '\n'
     << "iterations=" << sol.iterations << '\n'
     << "converged=" << b(sol.converged) << '\n';
  return os.str();
}

std::string skew_text(const SkewReport& r) {
  std::ostringstream os;
  const std::pair<const char*, double> vals[] = {
      {"v_all", r.v_all},           {"v_maj", r.v_maj},           {"v_min", r.v_min},
      {"vt_maj", r.vt_maj},         {"vt_min", r.vt_min},         {"kappa1", r.kappa1},
      {"kappa2", r.kappa2},         {"kappa1_tilde", r.kappa1_tilde}, {"kappa2_tilde", r.kappa2_tilde},
      {"c1", r.c1},                 {"c2", r.c2},                 {"lower_bound", r.lower_bound},
      {"upper_bound", r.upper_bound}, {"measured_Bwsp", r.measured_Bwsp}, {"slack_lower", r.slack_lower},
      {"slack_upper", r.slack_upper}};
  for (const auto& [k, v] : vals) os << k << '=' << format_double(v) << '\n';
  os << "lb_precondition_met=" << b(r.lb_precondition_met) << '\n'
     << "ub_precondition_met=" << b(r.ub_precondition_met) << '\n'
     << "missing_group=" << b(r.missing_group) << '\n'
     << "bounds_hold=" << b(r.bounds_hold()) << '\n';
  return os.str();
}

std::string cell_prefix(const Cell& c) {
  return c.tag + ',' + format_double(c.p) + ',' + format_double(c.B) + ',' + std::to_string(c.seed);
}

class Runner {
 public:
  Runner(const ExperimentConfig& cfg) : cfg_(cfg) {}

  Dataset dataset(const Cell& c) const {
    if (!cfg_.dataset.empty()) return load_dataset(cfg_.dataset);
    return build_dataset(cfg_.generator, c.p, c.B, c.seed);
  }

  void gen(const Cell& c, CellOutput& out) const {
    const auto d = dataset(c);
    std::ostringstream csv, meta;
    write_dataset_csv(d, csv);
    write_dataset_meta(d, meta);
    out.files.emplace_back("dataset_" + c.tag + ".csv", csv.str());
    out.files.emplace_back("dataset_" + c.tag + ".meta", meta.str());
    std::string p_emp = "nan";
    if (d.sp_dim() == 1) {
      try {
        p_emp = format_double(empirical_p(d));
      } catch (const Error&) {
      }
    }
    out.rows.push_back(cell_prefix(c) + ',' + std::to_string(d.size()) + ',' + p_emp + ',' +
                       std::to_string(d.inv_dim()) + ',' + std::to_string(d.sp_dim()));
  }

  void maxmargin(const Cell& c, CellOutput& out) const {
    auto d = dataset(c);
    const auto& mm = cfg_.maxmargin;
    if (mm.subset != "all") {
      const auto groups = split_groups(d);
      const auto& idx = mm.subset == "maj" ? groups.majority : groups.minority;
      if (idx.empty()) throw Error(ErrorCode::MissingGroup, "requested group is empty");
      d = d.subset(idx);
    }
    QpSolution sol;
    if (mm.targets.rfind("balanced:", 0) == 0) {
      if (mm.subset != "all") throw Error(ErrorCode::InvalidArgument, "balanced targets need the full dataset");
      sol = balanced_max_margin(d, parse_double(mm.targets.substr(9)), cfg_.solver);
    } else {
      sol = solve_least_norm(MarginProblem::from(d, mm.mask, mm.bias), cfg_.solver);
    }
    out.text = model_text(sol);
    out.files.emplace_back("maxmargin_" + c.tag + ".txt", out.text);
    if (mm.write_duals) {
      std::ostringstream duals;
      duals << "i,alpha\n";
      for (Eigen::Index i = 0; i < sol.duals.size(); ++i) duals << i << ',' << format_double(sol.duals(i)) << '\n';
      out.files.emplace_back("duals_" + c.tag + ".csv", duals.str());
    }
    const double w_sp = sol.model.w_sp.size() == 1 ? sol.model.w_sp(0) : sol.model.w_sp.norm();
    out.rows.push_back(cell_prefix(c) + ',' + std::to_string(d.size()) + ',' + format_double(sol.model.w_inv.norm()) +
                       ',' + format_double(w_sp) + ',' + format_double(sol.model.bias) + ',' +
                       format_double(sol.model.norm()) + ',' + format_double(sol.kkt_residual) + ',' +
                       std::to_string(sol.iterations) + ',' + b(sol.converged));
    if (!sol.converged) out.error = "solver did not converge";
  }

  void skews(const Cell& c, CellOutput& out) const {
    const auto r = compute_skew_report(dataset(c), cfg_.solver);
    out.text = skew_text(r);
    out.files.emplace_back("skews_" + c.tag + ".txt", out.text);
    const double cols[] = {r.kappa1,      r.kappa2,      r.kappa1_tilde,  r.kappa2_tilde, r.c1,
                           r.c2,          r.lower_bound, r.upper_bound,   r.measured_Bwsp, r.slack_lower,
                           r.slack_upper};
    std::string row = cell_prefix(c);
    for (double v : cols) row += ',' + format_double(v);
    row += ',' + b(r.lb_precondition_met) + ',' + b(r.ub_precondition_met) + ',' + b(r.missing_group) + ',' +
           b(r.bounds_hold());
    out.rows.push_back(row);
    if (r.missing_group) out.error = "MissingGroup: a group is empty";
  }

  void normcurve(const Cell& c, CellOutput& out) const {
    InvSet pts;
    if (cfg_.dataset.empty() && cfg_.generator.spec.generator == "attach") {
      const std::size_t n_max = cfg_.normcurve.sizes.empty() ? cfg_.generator.spec.n : cfg_.normcurve.sizes.back();
      pts = build_inv_points(cfg_.generator, std::max(n_max, cfg_.generator.spec.n), c.seed);
    } else {
      for (const auto& p : dataset(c).points()) pts.push_back({p.x_inv, p.y});
    }
    auto opts = cfg_.normcurve.options;
    opts.seed = splitmix64(opts.seed ^ c.seed);
    const auto rows = norm_growth_curve(pts, cfg_.normcurve.sizes, opts, cfg_.solver);
    SvgSeries s;
    s.name = c.tag;
    for (const auto& r : rows) {
      out.rows.push_back(cell_prefix(c) + ',' + std::to_string(r.n) + ',' + format_double(r.v_norm) + ',' +
                         format_double(r.v_tilde_norm));
      s.x.push_back(static_cast<double>(r.n));
      s.y.push_back(r.v_norm);
    }
    out.series.push_back(std::move(s));
  }

  void dynamics(const Cell& c, CellOutput& out) const {
    const auto d = dataset(c);
    DynSpec spec = cfg_.dynamics.spec;
    spec.checkpoints = resolve_checkpoints(cfg_.dynamics);
    const auto traj = simulate(d, spec);
    out.files.emplace_back("traj_" + c.tag + ".csv", trajectory_csv(traj));

    std::string envelope = "na";
    if (cfg_.dynamics.bounds != "none") {
      const auto kind = cfg_.dynamics.bounds == "logistic" ? EnvelopeKind::Logistic2d : EnvelopeKind::SkewFreeExp;
      const auto check = check_envelope(d, traj, kind, cfg_.dynamics.t0);
      std::ostringstream bounds;
      bounds << "t,lower,upper,beta\n";
      for (const auto& r : check.rows)
        bounds << format_double(r.t) << ',' << format_double(r.lower) << ',' << format_double(r.upper) << ','
               << format_double(r.beta) << '\n';
      out.files.emplace_back("bounds_" + c.tag + ".csv", bounds.str());
      envelope = check.all_inside ? "inside" : "outside";
    }
    const auto& last = traj.records.back();
    out.rows.push_back(cell_prefix(c) + ',' + format_double(last.t) + ',' + format_double(last.w_inv.norm()) + ',' +
                       format_double(last.w_sp_scalar) + ',' + format_double(last.beta) + ',' +
                       format_double(last.beta_2d) + ',' + std::to_string(traj.steps) + ',' +
                       std::to_string(traj.rejected_steps) + ',' + std::to_string(traj.clamp_events) + ',' +
                       envelope);
    SvgSeries s;
    s.name = c.tag;
    for (const auto& r : traj.records) {
      s.x.push_back(r.t);
      s.y.push_back(r.beta);
    }
    out.series.push_back(std::move(s));
  }

 private:
  const ExperimentConfig& cfg_;
};

const char* header_for(const std::string& kind) {
  if (kind == "gen") return "tag,p,B,seed,n,p_empirical,inv_dim,sp_dim";
  if (kind == "maxmargin") return "tag,p,B,seed,n,w_inv_norm,w_sp,bias,norm,kkt_residual,iterations,converged";
  if (kind == "skews")
    return "tag,p,B,seed,kappa1,kappa2,kappa1_tilde,kappa2_tilde,c1,c2,lower_bound,upper_bound,measured_Bwsp,"
           "slack_lower,slack_upper,lb_precondition_met,ub_precondition_met,missing_group,bounds_hold";
  if (kind == "normcurve") return "tag,p,B,seed,n,v_norm,v_tilde_norm";
  return "tag,p,B,seed,t,w_inv_norm,w_sp,beta,beta_2d,steps,rejected_steps,clamp_events,envelope";
}

class OutputDir {
 public:
  OutputDir(std::filesystem::path root, ExperimentResult& result) : root_(std::move(root)), result_(result) {
    std::filesystem::create_directories(root_);
  }

  void write(const std::string& name, const std::string& content) {
    std::ofstream f(root_ / name, std::ios::binary);
    if (!f) throw Error(ErrorCode::Io, "cannot write " + (root_ / name).string());
    f << content;
    result_.files.push_back(name);
  }

 private:
  std::filesystem::path root_;
  ExperimentResult& result_;
};

void finish(const ExperimentConfig& cfg, std::size_t cells, OutputDir& dir, ExperimentResult& result) {
  std::ostringstream summary;
  summary << "kind=" << cfg.kind << '\n'
          << "cells=" << cells << '\n'
          << "failed=" << result.failures.size() << '\n'
          << "files=" << result.files.size() + 2 << '\n';
  dir.write("summary.txt", summary.str());
  std::ostringstream manifest;
  for (const auto& f : result.files) manifest << "file " << f << '\n';
  manifest << "file manifest.txt\n";
  for (const auto& f : result.failures) manifest << "failure " << f << '\n';
  dir.write("manifest.txt", manifest.str());
  result.exit_code = result.failures.empty() ? 0 : 1;
}

ExperimentResult run_verify(const ExperimentConfig& cfg, std::ostream& out) {
  ExperimentResult result;
  OutputDir dir(cfg.out, result);
  std::ostringstream text;
  for (const auto& r : run_criteria(cfg.criteria)) {
    const auto line = format_criterion(r);
    out << line << "  [" << std::lround(r.seconds * 1000.0) << " ms]" << std::endl;
    text << line << '\n';
    if (!r.passed) result.failures.push_back("criterion " + std::to_string(r.id) + ": " + r.detail);
  }
  dir.write("verify.txt", text.str());
  finish(cfg, 1, dir, result);
  return result;
}

std::vector<std::vector<std::string>> read_csv_cells(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

ExperimentResult run_report(const ExperimentConfig& cfg, std::ostream& out) {
  ExperimentResult result;
  const std::filesystem::path input = cfg.report_input.empty() ? cfg.out : std::filesystem::path(cfg.report_input);
  if (!std::filesystem::is_directory(input)) throw Error(ErrorCode::Io, "report input is not a directory: " + input.string());
  std::vector<std::filesystem::path> trajs;
  for (const auto& entry : std::filesystem::directory_iterator(input)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind("traj_", 0) == 0 && entry.path().extension() == ".csv")
      trajs.push_back(entry.path());
  }
  std::sort(trajs.begin(), trajs.end());

  OutputDir dir(cfg.out, result);
  std::ostringstream csv;
  csv << "tag,t,sp_share,beta\n";
  SvgChart chart{"spurious share of the weight", "t", "w_sp / sqrt(w_inv^2 + w_sp^2)", true, {}};
  for (const auto& path : trajs) {
    const std::string tag = path.stem().string().substr(5);
    const auto rows = read_csv_cells(path);
    if (rows.empty() || rows[0].size() < 5 || rows[0][0] != "t" || rows[0][2] != "w_inv_norm" || rows[0][3] != "w_sp") {
      result.failures.push_back(tag + ": not a trajectory CSV");
      continue;
    }
    SvgSeries s;
    s.name = tag;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const double t = parse_double(rows[i][0]);
      const double wi = parse_double(rows[i][2]);
      const double ws = parse_double(rows[i][3]);
      const double den = std::hypot(wi, ws);
      const double share = den > 0 ? ws / den : 0.0;
      csv << tag << ',' << rows[i][0] << ',' << format_double(share) << ',' << rows[i][4] << '\n';
      s.x.push_back(t);
      s.y.push_back(share);
    }
    chart.series.push_back(std::move(s));
  }
  dir.write("report.csv", csv.str());
  if (cfg.emit_svg) dir.write("report.svg", render_svg(chart));
  out << "report: " << trajs.size() << " trajectories from " << input.string() << '\n';
  finish(cfg, trajs.size(), dir, result);
  return result;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  if (cfg.kind == "verify") return run_verify(cfg, out);
  if (cfg.kind == "report") return run_report(cfg, out);

  std::vector<Cell> cells;
  if (!cfg.dataset.empty()) {
    cells.push_back({"data", cfg.generator.spec.p, cfg.generator.spec.B, cfg.generator.spec.seed});
  } else {
    for (double p : cfg.sweep.p)
      for (double B : cfg.sweep.B)
        for (auto seed : cfg.sweep.seeds)
          cells.push_back({"p" + format_double(p) + "_B" + format_double(B) + "_s" + std::to_string(seed), p, B, seed});
  }

  const Runner runner(cfg);
  using Step = void (Runner::*)(const Cell&, CellOutput&) const;
  Step step = nullptr;
  if (cfg.kind == "gen") step = &Runner::gen;
  if (cfg.kind == "maxmargin") step = &Runner::maxmargin;
  if (cfg.kind == "skews") step = &Runner::skews;
  if (cfg.kind == "normcurve") step = &Runner::normcurve;
  if (cfg.kind == "dynamics") step = &Runner::dynamics;

  std::vector<CellOutput> outputs(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        (runner.*step)(cells[i], outputs[i]);
      } catch (const std::exception& e) {
        outputs[i].error = e.what();
      }
    }
  };
  const std::size_t jobs = std::min(cfg.jobs, cells.size());
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < jobs; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  ExperimentResult result;
  OutputDir dir(cfg.out, result);
  std::ostringstream table;
  table << header_for(cfg.kind) << '\n';
  std::vector<SvgSeries> series;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto& o = outputs[i];
    for (const auto& [name, content] : o.files) dir.write(name, content);
    for (const auto& row : o.rows) table << row << '\n';
    for (auto& s : o.series) series.push_back(std::move(s));
    if (!o.error.empty()) result.failures.push_back(cells[i].tag + ": " + o.error);
  }
  dir.write(cfg.kind + ".csv", table.str());

  if (cfg.emit_svg && !series.empty()) {
    SvgChart chart;
    chart.series = std::move(series);
    if (cfg.kind == "dynamics") {
      chart.title = std::string("beta under ") + to_string(cfg.dynamics.spec.loss) + " loss";
      chart.x_label = cfg.dynamics.spec.mode == DynMode::Flow ? "t" : "epoch";
      chart.y_label = "beta";
      chart.log_x = true;
    } else {
      chart.title = "norm growth of the invariant max-margin classifier";
      chart.x_label = "n";
      chart.y_label = "||v(S_n)||";
    }
    dir.write(cfg.kind + ".svg", render_svg(chart));
  }

  if (cells.size() == 1 && !outputs[0].text.empty()) out << outputs[0].text;
  for (const auto& f : result.failures) out << "failed " << f << '\n';
  finish(cfg, cells.size(), dir, result);
  return result;
}

}  // namespace skewlab
