#pragma once

#include "driftflow/kernelops.hpp"

#include <optional>

namespace driftflow {

// Drift supervision settings. The negative side reuses the positive kernel
// temperature unless tau_neg overrides it.
struct DriftConfig {
    KernelSpec kernel;
    int sinkhorn_iters = 1;
    std::optional<double> tau_neg;

    void validate() const;
    double neg_tau() const { return tau_neg.value_or(kernel.tau); }
};

struct DriftOutput {
    Matrix V;            // (G*B) x d drift vectors, group-major rows
    Vector pos_plan_err; // per-group max marginal deviation, positive side
    Vector neg_plan_err; // per-group max marginal deviation, negative side
};

// Per-group kernel drift: each query is pulled toward a weighted mean of the
// group's pos rows and pushed from a weighted mean of its neg rows,
//   V_i = sum_j Wp_ij pos_j - sum_j Wn_ij neg_j,
// where Wp / Wn are row-normalized (Sinkhorn-scaled when sinkhorn_iters > 1)
// Gibbs weights with uniform marginals. Groups never mix. In training the
// queries double as the negative set, self-interaction included.
DriftOutput grouped_drift(const Matrix& queries, const Matrix& pos,
                          const Matrix& neg, int group_count,
                          const DriftConfig& cfg);

// Regression target with the drift treated as a constant: queries + V.
Matrix drift_target(const Matrix& queries, const DriftOutput& drift);

} // namespace driftflow
