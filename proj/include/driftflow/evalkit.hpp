#pragma once

#include "driftflow/pointbatch.hpp"
#include "driftflow/timepath.hpp"

#include <cstdint>
#include <vector>

namespace driftflow {

struct W2Result {
    double w2_squared = 0.0;
    std::vector<int> assignment;  // row i of a is matched to row assignment[i] of b
};

// Exact squared 2-Wasserstein distance between two equal-count empirical
// distributions: a minimum-cost perfect matching on squared Euclidean
// distances, found with a shortest-augmenting-path assignment solver, divided
// by n. When the identity permutation ties the optimum it is returned.
// Desk-scale solver: n <= 1024.
W2Result exact_w2(const Matrix& a, const Matrix& b);

struct BoundReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

// Interval transport bound on shared endpoint rows:
//   W2(p_t, p_r) <= |r - t| * sqrt(mean |x1 - x0|^2),
// checked with slack 1e-9 on empirical interpolants of the same rows.
BoundReport check_w2_interval_bound(const PointBatch& x0, const PointBatch& x1,
                                    double t, double r);

struct ActionReport {
    double action_sum = 0.0;
    double bound = 0.0;
    bool holds = false;
};

// Grid action bound: sum_m W2^2(p_{t_m}, p_{t_{m+1}}) / (t_{m+1} - t_m)
// never exceeds mean |x1 - x0|^2 (slack 1e-9).
ActionReport check_action_bound(const PointBatch& x0, const PointBatch& x1,
                                const std::vector<double>& grid);

// Closed-form marginal velocity of the linear path from N(0, I) to
// N(0, sigma1^2 I): v(x, t) = c(t) * x with
// c(t) = (t sigma1^2 - (1 - t)) / ((1 - t)^2 + t^2 sigma1^2).
double gaussian_velocity_coeff(double t, double sigma1);
Matrix gaussian_marginal_velocity(const Matrix& x, double t, double sigma1);

// Squared-W2 distance between a generated batch and a reference batch.
// Counts are equalized by a seed-deterministic subsample of the larger side
// (and both sides are capped at the n = 1024 solver budget). Labeled inputs
// are scored per class and averaged; a class present on only one side or a
// labeled/unlabeled mix is a metric error.
double emd_to_target(const PointBatch& generated, const PointBatch& reference,
                     std::uint64_t seed = 0);

} // namespace driftflow
