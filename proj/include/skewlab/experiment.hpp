#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "skewlab/config.hpp"

namespace skewlab {

struct ExperimentResult {
  int exit_code = 0;
  std::vector<std::string> files;     // written, relative to the output directory
  std::vector<std::string> failures;  // "<cell>: <message>"
};

/// Invariant points for the generator's inv_source.
InvSet build_inv_points(const GeneratorConfig& g, std::size_t n, std::uint64_t seed);

/// One dataset for a sweep cell.
Dataset build_dataset(const GeneratorConfig& g, double p, double B, std::uint64_t seed);

/// Checkpoints from the explicit list, else a log grid (whole epochs in discrete mode).
std::vector<double> resolve_checkpoints(const DynamicsConfig& dyn);

/// Trajectory CSV with header t,loss,w_inv_norm,w_sp,beta,beta_2d,residual_norm.
std::string trajectory_csv(const Trajectory& traj);

/// Runs the sweep grid. Cells run on up to cfg.jobs threads; every file is
/// written by the calling thread in cell order. Writes summary.txt and
/// manifest.txt; single-cell maxmargin and skews runs also print key=value text.
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream& out);

}  // namespace skewlab
