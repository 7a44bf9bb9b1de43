#include "driftflow/driftfield.hpp"

#include "driftflow/errors.hpp"
#include "driftflow/parallel.hpp"

namespace driftflow {

void DriftConfig::validate() const {
    kernel.validate();
    if (sinkhorn_iters < 1) throw argument_error("sinkhorn_iters must be >= 1");
    if (tau_neg && !(*tau_neg > 0.0)) throw argument_error("tau_neg must be positive");
}

namespace {

// One side of the drift for one group: row-weighted mean of the points.
Matrix weighted_pull(const Matrix& queries, const Matrix& points, CostKind cost,
                     double tau, int iters, const Vector& marg, double& plan_err) {
    const Matrix logits = gibbs_logits(pairwise_cost(queries, points, cost), tau);
    const CouplingPlan plan = sinkhorn_from_logits(logits, marg, marg, iters);
    plan_err = std::max(plan.row_marginal_err, plan.col_marginal_err);
    return plan_row_weights(logits, plan.log_col_potential) * points;
}

} // namespace

DriftOutput grouped_drift(const Matrix& queries, const Matrix& pos,
                          const Matrix& neg, int group_count,
                          const DriftConfig& cfg) {
    cfg.validate();
    if (group_count < 1) throw argument_error("grouped_drift: group_count must be >= 1");
    const long rows = queries.rows(), d = queries.cols();
    if (pos.rows() != rows || neg.rows() != rows || pos.cols() != d || neg.cols() != d)
        throw argument_error("grouped_drift: queries/pos/neg shapes differ");
    if (rows % group_count != 0)
        throw argument_error("grouped_drift: rows not divisible by group_count");
    if (!queries.allFinite() || !pos.allFinite() || !neg.allFinite())
        throw argument_error("grouped_drift: non-finite inputs");

    const long B = rows / group_count;
    const Vector marg = Vector::Constant(B, 1.0 / static_cast<double>(B));

    DriftOutput out;
    out.V.resize(rows, d);
    out.pos_plan_err.resize(group_count);
    out.neg_plan_err.resize(group_count);

    parallel_for(group_count, [&](int g) {
        const long lo = static_cast<long>(g) * B;
        const Matrix q = queries.middleRows(lo, B);
        double perr = 0.0, nerr = 0.0;
        const Matrix pull = weighted_pull(q, pos.middleRows(lo, B), cfg.kernel.cost,
                                          cfg.kernel.tau, cfg.sinkhorn_iters, marg, perr);
        const Matrix push = weighted_pull(q, neg.middleRows(lo, B), cfg.kernel.cost,
                                          cfg.neg_tau(), cfg.sinkhorn_iters, marg, nerr);
        out.V.middleRows(lo, B) = pull - push;
        out.pos_plan_err(g) = perr;
        out.neg_plan_err(g) = nerr;
    });
    return out;
}

Matrix drift_target(const Matrix& queries, const DriftOutput& drift) {
    if (drift.V.rows() != queries.rows() || drift.V.cols() != queries.cols())
        throw argument_error("drift_target: shape mismatch");
    return queries + drift.V;
}

} // namespace driftflow
