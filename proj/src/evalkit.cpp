#include "driftflow/evalkit.hpp"

#include "driftflow/errors.hpp"
#include "driftflow/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace driftflow {

namespace {

// Minimum-cost perfect matching by shortest augmenting paths with dual
// potentials, one row inserted at a time. Exact for real-valued costs; cubic
// in n. Indices are 1-based internally, column 0 is the virtual start.
std::vector<int> solve_assignment(const Matrix& cost) {
    const int n = static_cast<int>(cost.rows());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1, 0);

    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = -1;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }

    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) row_to_col[static_cast<size_t>(p[j] - 1)] = j - 1;
    return row_to_col;
}

double sq_dist(const Matrix& a, long i, const Matrix& b, long j) {
    double sq = 0.0;
    for (long k = 0; k < a.cols(); ++k) {
        const double diff = a(i, k) - b(j, k);
        sq += diff * diff;
    }
    return sq;
}

double assignment_cost(const Matrix& cost, const std::vector<int>& perm) {
    double total = 0.0;
    for (size_t i = 0; i < perm.size(); ++i)
        total += cost(static_cast<long>(i), perm[i]);
    return total;
}

double mean_sq_displacement(const Matrix& x0, const Matrix& x1) {
    double acc = 0.0;
    for (long i = 0; i < x0.rows(); ++i) acc += sq_dist(x1, i, x0, i);
    return acc / static_cast<double>(x0.rows());
}

// Seed-deterministic choice of k of n row indices, returned ascending.
std::vector<long> subsample_indices(long n, long k, Rng& rng) {
    std::vector<long> idx(static_cast<size_t>(n));
    for (long i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
    for (long i = 0; i < k; ++i) {
        const long j = i + static_cast<long>(rng.uniform_index(
                               static_cast<std::uint64_t>(n - i)));
        std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
    }
    idx.resize(static_cast<size_t>(k));
    std::sort(idx.begin(), idx.end());
    return idx;
}

Matrix take_rows(const Matrix& m, const std::vector<long>& rows) {
    Matrix out(static_cast<long>(rows.size()), m.cols());
    for (size_t i = 0; i < rows.size(); ++i) out.row(static_cast<long>(i)) = m.row(rows[i]);
    return out;
}

constexpr long kSolverBudget = 1024;
constexpr double kBoundSlack = 1e-9;

} // namespace

W2Result exact_w2(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows())
        throw argument_error("exact_w2: point counts differ (" +
                             std::to_string(a.rows()) + " vs " +
                             std::to_string(b.rows()) + ")");
    if (a.cols() != b.cols()) throw argument_error("exact_w2: dimensions differ");
    if (a.rows() < 1) throw argument_error("exact_w2: empty input");
    if (a.rows() > kSolverBudget)
        throw argument_error("exact_w2: n exceeds the exact-solver budget of 1024");
    if (!a.allFinite() || !b.allFinite())
        throw argument_error("exact_w2: non-finite points");

    const long n = a.rows();
    Matrix cost(n, n);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) cost(i, j) = sq_dist(a, i, b, j);

    std::vector<int> perm = solve_assignment(cost);

    // Prefer the identity whenever it ties the optimum (a == b gives 0 = 0).
    std::vector<int> identity(static_cast<size_t>(n));
    for (long i = 0; i < n; ++i) identity[static_cast<size_t>(i)] = static_cast<int>(i);
    if (assignment_cost(cost, identity) <= assignment_cost(cost, perm))
        perm = std::move(identity);

    W2Result res;
    res.w2_squared = assignment_cost(cost, perm) / static_cast<double>(n);
    res.assignment = std::move(perm);
    return res;
}

BoundReport check_w2_interval_bound(const PointBatch& x0, const PointBatch& x1,
                                    double t, double r) {
    if (t > r) throw argument_error("check_w2_interval_bound: needs t <= r");
    const PointBatch xt = interpolate(x0, x1, t);
    const PointBatch xr = interpolate(x0, x1, r);
    BoundReport rep;
    rep.lhs = std::sqrt(exact_w2(xt.data, xr.data).w2_squared);
    rep.rhs = (r - t) * std::sqrt(mean_sq_displacement(x0.data, x1.data));
    rep.holds = rep.lhs <= rep.rhs + kBoundSlack;
    return rep;
}

ActionReport check_action_bound(const PointBatch& x0, const PointBatch& x1,
                                const std::vector<double>& grid) {
    if (grid.size() < 2) throw argument_error("check_action_bound: grid too short");
    for (size_t m = 0; m + 1 < grid.size(); ++m)
        if (!(grid[m] < grid[m + 1]))
            throw argument_error("check_action_bound: grid must ascend strictly");
    if (grid.front() != 0.0 || grid.back() != 1.0)
        throw argument_error("check_action_bound: grid must span [0, 1]");

    ActionReport rep;
    PointBatch prev = interpolate(x0, x1, grid[0]);
    for (size_t m = 0; m + 1 < grid.size(); ++m) {
        PointBatch next = interpolate(x0, x1, grid[m + 1]);
        const double w2sq = exact_w2(prev.data, next.data).w2_squared;
        rep.action_sum += w2sq / (grid[m + 1] - grid[m]);
        prev = std::move(next);
    }
    rep.bound = mean_sq_displacement(x0.data, x1.data);
    rep.holds = rep.action_sum <= rep.bound + kBoundSlack;
    return rep;
}

double gaussian_velocity_coeff(double t, double sigma1) {
    if (!(sigma1 > 0.0)) throw argument_error("gaussian_velocity_coeff: sigma1 > 0");
    if (!(t >= 0.0 && t <= 1.0)) throw argument_error("gaussian_velocity_coeff: t in [0,1]");
    const double s2 = sigma1 * sigma1;
    return (t * s2 - (1.0 - t)) / ((1.0 - t) * (1.0 - t) + t * t * s2);
}

Matrix gaussian_marginal_velocity(const Matrix& x, double t, double sigma1) {
    return gaussian_velocity_coeff(t, sigma1) * x;
}

double emd_to_target(const PointBatch& generated, const PointBatch& reference,
                     std::uint64_t seed) {
    if (generated.labeled() != reference.labeled())
        throw metric_error("emd_to_target: one side is labeled, the other is not");
    if (generated.n() < 1 || reference.n() < 1)
        throw metric_error("emd_to_target: empty batch");

    Rng rng(derive_seed(seed, 0xe3du));

    if (!generated.labeled()) {
        const long k =
            std::min({static_cast<long>(generated.n()),
                      static_cast<long>(reference.n()), kSolverBudget});
        const auto gi = subsample_indices(generated.n(), k, rng);
        const auto ri = subsample_indices(reference.n(), k, rng);
        return exact_w2(take_rows(generated.data, gi), take_rows(reference.data, ri))
            .w2_squared;
    }

    std::set<int> classes;
    for (long i = 0; i < generated.labels->size(); ++i)
        classes.insert((*generated.labels)(i));
    for (long i = 0; i < reference.labels->size(); ++i)
        classes.insert((*reference.labels)(i));

    double total = 0.0;
    for (int c : classes) {
        std::vector<long> gc, rc;
        for (long i = 0; i < generated.labels->size(); ++i)
            if ((*generated.labels)(i) == c) gc.push_back(i);
        for (long i = 0; i < reference.labels->size(); ++i)
            if ((*reference.labels)(i) == c) rc.push_back(i);
        if (gc.empty())
            throw metric_error("emd_to_target: class " + std::to_string(c) +
                               " missing from the generated batch");
        if (rc.empty())
            throw metric_error("emd_to_target: class " + std::to_string(c) +
                               " missing from the reference batch");
        const long k = std::min({static_cast<long>(gc.size()),
                                 static_cast<long>(rc.size()), kSolverBudget});
        const auto gsel = subsample_indices(static_cast<long>(gc.size()), k, rng);
        const auto rsel = subsample_indices(static_cast<long>(rc.size()), k, rng);
        std::vector<long> grows, rrows;
        for (long s : gsel) grows.push_back(gc[static_cast<size_t>(s)]);
        for (long s : rsel) rrows.push_back(rc[static_cast<size_t>(s)]);
        total += exact_w2(take_rows(generated.data, grows),
                          take_rows(reference.data, rrows))
                     .w2_squared;
    }
    return total / static_cast<double>(classes.size());
}

} // namespace driftflow
