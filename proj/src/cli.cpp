#include "skewlab/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <optional>
#include <ostream>

#include "skewlab/experiment.hpp"

namespace skewlab {

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> jobs;
  bool svg = false;
  std::optional<std::string> data;

  // generator
  std::optional<std::string> generator;
  std::optional<std::size_t> n;
  std::vector<double> p;
  std::vector<double> B;
  bool pairing = false;
  bool sampled = false;
  std::optional<double> maj_margin, min_margin;
  std::optional<std::size_t> n_maj, n_min, D;
  std::optional<std::string> breaker;
  std::optional<double> dup_ratio;
  std::optional<std::string> inv_source;

  // maxmargin
  std::optional<std::string> mask, targets, subset;
  bool no_bias = false;
  bool duals = false;

  // normcurve
  std::vector<std::size_t> sizes;
  bool resample = false;

  // dynamics
  std::optional<std::string> loss, mode, bounds;
  std::optional<double> lr, decay, t_min, t_max, t0;
  std::optional<int> per_decade;
  std::optional<std::size_t> batch_size;

  // verify / report
  bool all = false;
  std::vector<int> criteria;
  std::optional<std::string> input;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "TOML experiment file")->check(CLI::ExistingFile);
  sub->add_option("--seed", f.seed, "single seed (overrides the sweep seeds)");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
}

void add_generator(CLI::App* sub, Flags& f) {
  sub->add_option("--data", f.data, "input dataset CSV (replaces the generator)")->check(CLI::ExistingFile);
  sub->add_option("--generator", f.generator, "2dim | geometric | highdim | breaker | attach");
  sub->add_option("--n", f.n, "number of points");
  sub->add_option("--p", f.p, "spurious-correlation levels (sweep axis)");
  sub->add_option("--B", f.B, "spurious scales (sweep axis)");
  sub->add_flag("--pairing", f.pairing, "pair every invariant point across groups");
  sub->add_flag("--sampled", f.sampled, "draw group membership instead of exact counts");
  sub->add_option("--maj-margin", f.maj_margin, "geometric: majority margin");
  sub->add_option("--min-margin", f.min_margin, "geometric: minority margin");
  sub->add_option("--n-maj", f.n_maj, "geometric: majority size");
  sub->add_option("--n-min", f.n_min, "geometric: minority size");
  sub->add_option("--D", f.D, "highdim: spurious dimensions");
  sub->add_option("--breaker", f.breaker, "unstable_invariant | cond_dependent | nonorthogonal");
  sub->add_option("--dup-ratio", f.dup_ratio, "duplicate the majority up to this ratio");
  sub->add_option("--inv-source", f.inv_source, "attach: gaussian | heavy_tail | idx | tabular");
}

template <typename T, typename U>
void take(const std::optional<T>& src, U& dst) {
  if (src) dst = *src;
}

ExperimentConfig assemble(const std::string& kind, const Flags& f) {
  ExperimentConfig cfg;
  if (!f.config.empty()) cfg = experiment_from_tables(load_config_file(f.config));
  cfg.kind = kind;
  auto& g = cfg.generator;
  take(f.out, cfg.out);
  take(f.jobs, cfg.jobs);
  if (f.svg) cfg.emit_svg = true;
  take(f.data, cfg.dataset);
  if (f.seed) {
    cfg.sweep.seeds = {*f.seed};
    g.spec.seed = *f.seed;
  }

  take(f.generator, g.spec.generator);
  take(f.n, g.spec.n);
  if (!f.p.empty()) cfg.sweep.p = f.p;
  if (!f.B.empty()) cfg.sweep.B = f.B;
  if (f.pairing) g.spec.pairing = true;
  if (f.sampled) g.spec.exact_counts = false;
  take(f.maj_margin, g.maj_margin);
  take(f.min_margin, g.min_margin);
  take(f.n_maj, g.n_maj);
  take(f.n_min, g.n_min);
  take(f.D, g.D);
  take(f.breaker, g.breaker);
  take(f.dup_ratio, g.duplicate_ratio);
  take(f.inv_source, g.inv_source);

  if (f.mask) {
    if (*f.mask != "inv" && *f.mask != "full") throw Error(ErrorCode::InvalidArgument, "--mask must be inv or full");
    cfg.maxmargin.mask = *f.mask == "inv" ? FeatureMask::InvOnly : FeatureMask::Full;
  }
  take(f.targets, cfg.maxmargin.targets);
  take(f.subset, cfg.maxmargin.subset);
  if (f.no_bias) cfg.maxmargin.bias = false;
  if (f.duals) cfg.maxmargin.write_duals = true;

  if (!f.sizes.empty()) cfg.normcurve.sizes = f.sizes;
  if (f.resample) cfg.normcurve.options.resample = true;

  auto& dyn = cfg.dynamics;
  if (f.loss) dyn.spec.loss = parse_loss(*f.loss);
  if (f.mode) dyn.spec.mode = parse_dyn_mode(*f.mode);
  take(f.bounds, dyn.bounds);
  take(f.lr, dyn.spec.lr);
  take(f.decay, dyn.spec.weight_decay);
  take(f.batch_size, dyn.spec.batch_size);
  take(f.t0, dyn.t0);
  if (f.t_min || f.t_max || f.per_decade) dyn.spec.checkpoints.clear();
  take(f.t_min, dyn.t_min);
  take(f.t_max, dyn.t_max);
  take(f.per_decade, dyn.per_decade);

  if (!f.criteria.empty()) cfg.criteria = f.criteria;
  if (f.all) cfg.criteria.clear();
  take(f.input, cfg.report_input);
  return cfg;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spurious-feature skew experiments on linear models", "skewlab"};
  app.require_subcommand(1, 1);
  Flags f;

  auto* gen = app.add_subcommand("gen", "generate datasets (CSV + .meta)");
  auto* mm = app.add_subcommand("maxmargin", "least-norm margin solves");
  auto* sk = app.add_subcommand("skews", "geometric-skew report and bounds");
  auto* nc = app.add_subcommand("normcurve", "norm growth of the invariant max-margin classifier");
  auto* dy = app.add_subcommand("dynamics", "gradient flow / descent trajectories");
  auto* ve = app.add_subcommand("verify", "run acceptance criteria");
  auto* re = app.add_subcommand("report", "derive report CSV and charts from trajectories");

  for (auto* sub : {gen, mm, sk, nc, dy, ve, re}) add_common(sub, f);
  for (auto* sub : {gen, mm, sk, nc, dy}) add_generator(sub, f);
  for (auto* sub : {nc, dy, re}) sub->add_flag("--svg", f.svg, "also write SVG charts");

  mm->add_option("--mask", f.mask, "inv | full");
  mm->add_option("--targets", f.targets, "default | balanced:<c>");
  mm->add_option("--subset", f.subset, "all | maj | min");
  mm->add_flag("--no-bias", f.no_bias, "fix the bias at zero");
  mm->add_flag("--duals", f.duals, "write the dual variables as CSV");

  nc->add_option("--sizes", f.sizes, "ascending prefix sizes");
  nc->add_flag("--resample", f.resample, "independent random subsets instead of nested prefixes");

  dy->add_option("--loss", f.loss, "exponential | logistic");
  dy->add_option("--mode", f.mode, "flow | discrete");
  dy->add_option("--lr", f.lr, "learning rate (discrete)");
  dy->add_option("--decay", f.decay, "l2 weight decay");
  dy->add_option("--batch-size", f.batch_size, "minibatch size, 0 = full batch");
  dy->add_option("--t-min", f.t_min, "first checkpoint");
  dy->add_option("--t-max", f.t_max, "last checkpoint");
  dy->add_option("--per-decade", f.per_decade, "checkpoints per decade");
  dy->add_option("--bounds", f.bounds, "none | skew_free | logistic");
  dy->add_option("--t0", f.t0, "envelope check start");

  ve->add_flag("--all", f.all, "run every criterion (default)");
  ve->add_option("--criterion", f.criteria, "criterion ids");
  re->add_option("--input", f.input, "directory holding traj_*.csv")->check(CLI::ExistingDirectory);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  const auto* chosen = app.get_subcommands().front();
  try {
    const auto cfg = assemble(chosen->get_name(), f);
    const auto result = run_experiment(cfg, out);
    return result.exit_code;
  } catch (const std::exception& e) {
    err << "skewlab: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace skewlab
