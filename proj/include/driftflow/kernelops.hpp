#pragma once

#include "driftflow/common.hpp"

namespace driftflow {

enum class CostKind { sq_euclid_half, euclid };

// Gibbs kernel description: k(x, y) = exp(-cost(x, y) / tau).
struct KernelSpec {
    CostKind cost = CostKind::sq_euclid_half;
    double tau = 1.0;

    void validate() const;
};

// n x m matrix of pairwise costs between the rows of x and y.
// sq_euclid_half is 0.5 * |x - y|^2, euclid is |x - y|.
Matrix pairwise_cost(const Matrix& x, const Matrix& y, CostKind kind);

// Kernel logits: -costs / tau. tau must be positive.
Matrix gibbs_logits(const Matrix& costs, double tau);

// Row-stochastic weights, computed with max-subtraction so large negative
// logits stay well conditioned.
Matrix row_softmax(const Matrix& logits);

struct CouplingPlan {
    Matrix plan;               // n x m, nonnegative
    double row_marginal_err;   // max_i |rowsum_i - row_marg_i|
    double col_marginal_err;   // max_j |colsum_j - col_marg_j|
    Vector log_row_potential;  // f, size n
    Vector log_col_potential;  // g, size m
};

// Log-domain Sinkhorn scaling of exp(logits) toward the given marginals.
// iters counts alternating single-sided scalings starting with the row side,
// so iters = 1 applies exactly one row normalization pass and the plan's
// row-normalized weights coincide with row_softmax(logits). The iteration
// count is fixed; no convergence threshold is applied. The plan is
// exp(logits + f_i + g_j).
CouplingPlan sinkhorn_from_logits(const Matrix& logits, const Vector& row_marg,
                                  const Vector& col_marg, int iters);

// Row-stochastic weights of a plan, recovered in the log domain from the
// column potential: softmax over rows of (logits + g^T). Equal to dividing
// each plan row by its sum, but immune to underflow, and bitwise equal to
// row_softmax(logits) when g = 0 (the iters = 1 case).
Matrix plan_row_weights(const Matrix& logits, const Vector& log_col_potential);

} // namespace driftflow
