#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace driftflow {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;

// Number of worker threads honored by the few parallel loops in the library.
// Read once from DRIFTFLOW_THREADS; defaults to 1 so results are reproducible
// out of the box. All parallel loops write disjoint output slots, so the
// result does not depend on this value.
int thread_budget();

} // namespace driftflow
