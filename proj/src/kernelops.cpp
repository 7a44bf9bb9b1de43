#include "driftflow/kernelops.hpp"

#include "driftflow/errors.hpp"

#include <cmath>

namespace driftflow {

namespace {

// log(sum(exp(v))) over one row with max shift; summation runs left to right
// so results are reproducible.
double logsumexp_row(const Eigen::Ref<const Eigen::RowVectorXd>& v) {
    const double m = v.maxCoeff();
    double acc = 0.0;
    for (long j = 0; j < v.size(); ++j) acc += std::exp(v(j) - m);
    return m + std::log(acc);
}

Matrix softmax_rows(const Matrix& shifted_logits) {
    Matrix w(shifted_logits.rows(), shifted_logits.cols());
    for (long i = 0; i < shifted_logits.rows(); ++i) {
        const double m = shifted_logits.row(i).maxCoeff();
        double sum = 0.0;
        for (long j = 0; j < shifted_logits.cols(); ++j) {
            const double e = std::exp(shifted_logits(i, j) - m);
            w(i, j) = e;
            sum += e;
        }
        for (long j = 0; j < shifted_logits.cols(); ++j) w(i, j) /= sum;
    }
    return w;
}

void check_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) throw argument_error(std::string(what) + ": non-finite entries");
}

} // namespace

void KernelSpec::validate() const {
    if (!(tau > 0.0)) throw argument_error("kernel tau must be positive");
}

Matrix pairwise_cost(const Matrix& x, const Matrix& y, CostKind kind) {
    if (x.cols() != y.cols())
        throw argument_error("pairwise_cost: dimension mismatch");
    check_finite(x, "pairwise_cost x");
    check_finite(y, "pairwise_cost y");
    Matrix c(x.rows(), y.rows());
    for (long i = 0; i < x.rows(); ++i) {
        for (long j = 0; j < y.rows(); ++j) {
            double sq = 0.0;
            for (long k = 0; k < x.cols(); ++k) {
                const double diff = x(i, k) - y(j, k);
                sq += diff * diff;
            }
            c(i, j) = kind == CostKind::sq_euclid_half ? 0.5 * sq : std::sqrt(sq);
        }
    }
    // finite states far enough apart can still overflow the squared distance;
    // that is a divergence of the surrounding run, not a usage error
    if (!c.allFinite()) throw divergence_error("pairwise_cost: distance overflow");
    return c;
}

Matrix gibbs_logits(const Matrix& costs, double tau) {
    if (!(tau > 0.0)) throw argument_error("gibbs_logits: tau must be positive");
    check_finite(costs, "gibbs_logits costs");
    return -costs / tau;
}

Matrix row_softmax(const Matrix& logits) {
    check_finite(logits, "row_softmax logits");
    return softmax_rows(logits);
}

CouplingPlan sinkhorn_from_logits(const Matrix& logits, const Vector& row_marg,
                                  const Vector& col_marg, int iters) {
    if (iters < 1) throw argument_error("sinkhorn_from_logits: iters must be >= 1");
    check_finite(logits, "sinkhorn logits");
    const long n = logits.rows(), m = logits.cols();
    if (row_marg.size() != n || col_marg.size() != m)
        throw argument_error("sinkhorn_from_logits: marginal sizes do not match logits");
    if ((row_marg.array() <= 0.0).any() || (col_marg.array() <= 0.0).any())
        throw argument_error("sinkhorn_from_logits: marginals must be positive");
    if (std::abs(row_marg.sum() - 1.0) > 1e-9 || std::abs(col_marg.sum() - 1.0) > 1e-9)
        throw argument_error("sinkhorn_from_logits: marginals must each sum to 1");

    const Vector log_a = row_marg.array().log();
    const Vector log_b = col_marg.array().log();
    Vector f = Vector::Zero(n), g = Vector::Zero(m);
    Eigen::RowVectorXd buf_row(m);
    Vector buf_col(n);

    for (int it = 0; it < iters; ++it) {
        if (it % 2 == 0) {
            // Row scaling: f_i = log a_i - lse_j(logits_ij + g_j).
            for (long i = 0; i < n; ++i) {
                for (long j = 0; j < m; ++j) buf_row(j) = logits(i, j) + g(j);
                f(i) = log_a(i) - logsumexp_row(buf_row);
            }
        } else {
            // Column scaling: g_j = log b_j - lse_i(logits_ij + f_i).
            for (long j = 0; j < m; ++j) {
                for (long i = 0; i < n; ++i) buf_col(i) = logits(i, j) + f(i);
                g(j) = log_b(j) - logsumexp_row(buf_col.transpose());
            }
        }
    }

    CouplingPlan out;
    out.plan.resize(n, m);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < m; ++j) out.plan(i, j) = std::exp(logits(i, j) + f(i) + g(j));
    out.row_marginal_err = (out.plan.rowwise().sum() - row_marg).cwiseAbs().maxCoeff();
    out.col_marginal_err =
        (out.plan.colwise().sum().transpose() - col_marg).cwiseAbs().maxCoeff();
    out.log_row_potential = std::move(f);
    out.log_col_potential = std::move(g);
    return out;
}

Matrix plan_row_weights(const Matrix& logits, const Vector& log_col_potential) {
    if (log_col_potential.size() != logits.cols())
        throw argument_error("plan_row_weights: potential size mismatch");
    Matrix shifted = logits;
    for (long i = 0; i < shifted.rows(); ++i)
        for (long j = 0; j < shifted.cols(); ++j) shifted(i, j) += log_col_potential(j);
    return softmax_rows(shifted);
}

} // namespace driftflow
