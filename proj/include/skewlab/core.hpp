#pragma once

#include "skewlab/types.hpp"

namespace skewlab {

enum class FeatureMask { InvOnly, Full };

/// Partition indices by sign(x_sp * y). Requires a two-valued scalar spurious block.
GroupSplit split_groups(const Dataset& d);

/// Fraction of points in the majority group.
double empirical_p(const Dataset& d);

/// Rows are the feature vectors [x_inv, x_sp] (or just x_inv under InvOnly).
Matrix design_matrix(const Dataset& d, FeatureMask mask);
Eigen::VectorXd labels(const Dataset& d);

/// Concatenated feature vector of a point under a mask.
Vector features(const LabeledPoint& p, FeatureMask mask);

/// Decide c1 by an inv-only unit-margin feasibility solve and c4 by a support
/// scan; c2, c3 and c5 are echoed from the generator provenance.
ConstraintReport validate_easy_task(const Dataset& d);

}  // namespace skewlab
