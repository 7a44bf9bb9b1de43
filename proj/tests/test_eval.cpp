#include <doctest.h>

#include "driftflow/errors.hpp"
#include "driftflow/evalkit.hpp"
#include "driftflow/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace driftflow;

namespace {

Matrix random_cloud(int n, Rng& rng, double spread = 1.0) {
    Matrix out(n, 2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < 2; ++j) out(i, j) = spread * rng.normal();
    return out;
}

double brute_force_w2(const Matrix& a, const Matrix& b) {
    const int n = static_cast<int>(a.rows());
    std::vector<int> perm(static_cast<size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (int i = 0; i < n; ++i)
            total += (a.row(i) - b.row(perm[static_cast<size_t>(i)])).squaredNorm();
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best / n;
}

} // namespace

TEST_CASE("matching cost equals exhaustive search on small instances") {
    Rng rng(501);
    for (int n = 2; n <= 6; ++n) {
        for (int rep = 0; rep < 20; ++rep) {
            Matrix a = random_cloud(n, rng);
            Matrix b = random_cloud(n, rng);
            W2Result res = exact_w2(a, b);
            const double want = brute_force_w2(a, b);
            CAPTURE(n);
            CAPTURE(rep);
            CHECK(res.w2_squared == doctest::Approx(want).epsilon(1e-12));

            // the reported assignment is a permutation achieving the value
            std::vector<char> seen(static_cast<size_t>(n), 0);
            double recompute = 0.0;
            REQUIRE(res.assignment.size() == static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) {
                const int j = res.assignment[static_cast<size_t>(i)];
                REQUIRE(j >= 0);
                REQUIRE(j < n);
                CHECK(!seen[static_cast<size_t>(j)]);
                seen[static_cast<size_t>(j)] = 1;
                recompute += (a.row(i) - b.row(j)).squaredNorm();
            }
            CHECK(recompute / n == doctest::Approx(res.w2_squared).epsilon(1e-12));
        }
    }
}

TEST_CASE("identical clouds score zero through the identity") {
    Rng rng(503);
    Matrix a = random_cloud(24, rng);
    W2Result res = exact_w2(a, a);
    CHECK(res.w2_squared == 0.0);
    for (int i = 0; i < 24; ++i) CHECK(res.assignment[static_cast<size_t>(i)] == i);
}

TEST_CASE("a rigid shift costs its squared length") {
    Rng rng(507);
    Matrix a = random_cloud(40, rng);
    Matrix b = a;
    for (int i = 0; i < 40; ++i) {
        b(i, 0) += 0.3;
        b(i, 1) -= 0.4;
    }
    W2Result res = exact_w2(a, b);
    CHECK(res.w2_squared == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("matching distance is symmetric and satisfies the triangle bound") {
    Rng rng(509);
    for (int rep = 0; rep < 30; ++rep) {
        Matrix a = random_cloud(16, rng);
        Matrix b = random_cloud(16, rng, 1.4);
        Matrix c = random_cloud(16, rng, 0.7);
        const double ab = std::sqrt(exact_w2(a, b).w2_squared);
        const double ba = std::sqrt(exact_w2(b, a).w2_squared);
        const double bc = std::sqrt(exact_w2(b, c).w2_squared);
        const double ac = std::sqrt(exact_w2(a, c).w2_squared);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
        CHECK(ac <= ab + bc + 1e-9);
    }
}

TEST_CASE("matcher rejects malformed inputs") {
    Matrix a = Matrix::Zero(4, 2), b = Matrix::Zero(5, 2);
    CHECK_THROWS_AS(exact_w2(a, b), argument_error);
    CHECK_THROWS_AS(exact_w2(a, Matrix::Zero(4, 3)), argument_error);
    CHECK_THROWS_AS(exact_w2(Matrix(0, 2), Matrix(0, 2)), argument_error);
    Matrix big = Matrix::Zero(1025, 2);
    CHECK_THROWS_AS(exact_w2(big, big), argument_error);
    Matrix nan_a = a;
    nan_a(0, 0) = std::nan("");
    CHECK_THROWS_AS(exact_w2(nan_a, a), argument_error);
}

TEST_CASE("gaussian widening velocity has the closed form") {
    CHECK(gaussian_velocity_coeff(0.5, 2.0) == doctest::Approx(1.2).epsilon(1e-15));
    CHECK(gaussian_velocity_coeff(0.5, 1.0) == 0.0);
    CHECK(gaussian_velocity_coeff(0.0, 3.0) == -1.0);
    CHECK(gaussian_velocity_coeff(1.0, 3.0) == 1.0);
    CHECK_THROWS_AS(gaussian_velocity_coeff(0.5, 0.0), argument_error);
    CHECK_THROWS_AS(gaussian_velocity_coeff(-0.1, 1.0), argument_error);

    Matrix x(2, 2);
    x << 1, 0, -2, 4;
    Matrix v = gaussian_marginal_velocity(x, 0.5, 2.0);
    CHECK(v(0, 0) == doctest::Approx(1.2).epsilon(1e-15));
    CHECK(v(1, 1) == doctest::Approx(4.8).epsilon(1e-15));
}

TEST_CASE("closed-form velocity matches a conditional expectation estimate") {
    // On the linear path between N(0, I) and N(0, 4I) the marginal velocity
    // at (x, t) is the conditional mean of X1 - X0 given X_t near x. Estimate
    // it at x* = (1, 0), t = 0.5 by rejection over a radius-0.1 window.
    Rng rng(4242);
    const double t = 0.5, sigma1 = 2.0, delta = 0.1;
    const long draws = 30000000;
    double sum_x = 0.0, sum_y = 0.0;
    long accepted = 0;
    for (long i = 0; i < draws; ++i) {
        const double z0x = rng.normal(), z0y = rng.normal();
        const double z1x = rng.normal(), z1y = rng.normal();
        const double xt_x = (1.0 - t) * z0x + t * sigma1 * z1x;
        const double xt_y = (1.0 - t) * z0y + t * sigma1 * z1y;
        const double dx = xt_x - 1.0, dy = xt_y - 0.0;
        if (dx * dx + dy * dy < delta * delta) {
            sum_x += sigma1 * z1x - z0x;
            sum_y += sigma1 * z1y - z0y;
            ++accepted;
        }
    }
    REQUIRE(accepted > 20000);
    const double want = gaussian_velocity_coeff(t, sigma1);  // 1.2 at x = (1, 0)
    CHECK(sum_x / accepted == doctest::Approx(want * 1.0).epsilon(0.02));
    CHECK(std::abs(sum_y / accepted) < 0.02);
}

TEST_CASE("interval bound is tight for straight-line motion") {
    PointBatch x0, x1;
    x0.data.resize(2, 2);
    x1.data.resize(2, 2);
    x0.data << 0, 0, 1, 0;
    x1.data << 0, 1, 1, 1;
    BoundReport rep = check_w2_interval_bound(x0, x1, 0.0, 1.0);
    CHECK(rep.lhs == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.rhs == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.holds);

    BoundReport degenerate = check_w2_interval_bound(x0, x1, 0.4, 0.4);
    CHECK(degenerate.lhs == 0.0);
    CHECK(degenerate.rhs == 0.0);
    CHECK(degenerate.holds);

    CHECK_THROWS_AS(check_w2_interval_bound(x0, x1, 0.8, 0.2), argument_error);
}

TEST_CASE("interval bound holds on random endpoints") {
    Rng rng(511);
    for (int rep = 0; rep < 50; ++rep) {
        PointBatch x0, x1;
        x0.data = random_cloud(12, rng);
        x1.data = random_cloud(12, rng, 1.5);
        const double a = rng.uniform(), b = rng.uniform();
        BoundReport report = check_w2_interval_bound(x0, x1, std::min(a, b), std::max(a, b));
        CAPTURE(rep);
        CHECK(report.holds);
    }
}

TEST_CASE("action bound is saturated by a pure translation") {
    Rng rng(513);
    PointBatch x0, x1;
    x0.data = random_cloud(20, rng);
    x1.data = x0.data;
    for (int i = 0; i < 20; ++i) {
        x1.data(i, 0) += 1.5;
        x1.data(i, 1) -= 0.5;
    }
    ActionReport rep = check_action_bound(x0, x1, {0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(rep.holds);
    CHECK(rep.bound == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(std::abs(rep.action_sum - rep.bound) < 1e-9);

    // random endpoints stay under the bound on uneven grids too
    for (int rep2 = 0; rep2 < 25; ++rep2) {
        PointBatch a, b;
        a.data = random_cloud(10, rng);
        b.data = random_cloud(10, rng, 2.0);
        ActionReport r = check_action_bound(a, b, {0.0, 0.1, 0.45, 1.0});
        CAPTURE(rep2);
        CHECK(r.holds);
    }

    CHECK_THROWS_AS(check_action_bound(x0, x1, {0.0}), argument_error);
    CHECK_THROWS_AS(check_action_bound(x0, x1, {0.0, 0.6, 0.4, 1.0}), argument_error);
    CHECK_THROWS_AS(check_action_bound(x0, x1, {0.1, 0.5, 1.0}), argument_error);
    CHECK_THROWS_AS(check_action_bound(x0, x1, {0.0, 0.5, 0.9}), argument_error);
}

TEST_CASE("distribution score handles plain batches") {
    Rng rng(517);
    PointBatch gen, ref;
    gen.data = random_cloud(60, rng);
    ref.data = gen.data;
    CHECK(emd_to_target(gen, ref) == 0.0);

    for (int i = 0; i < 60; ++i) ref.data(i, 0) += 2.0;
    CHECK(emd_to_target(gen, ref) == doctest::Approx(4.0).epsilon(1e-12));

    // unequal counts are equalized deterministically by the seed
    PointBatch big;
    big.data = random_cloud(150, rng);
    const double v1 = emd_to_target(gen, big, 7);
    const double v2 = emd_to_target(gen, big, 7);
    CHECK(v1 == v2);
    const double v3 = emd_to_target(gen, big, 8);
    CHECK(v3 != v1);  // a different subsample of the larger side
    CHECK(v1 >= 0.0);
    CHECK(std::isfinite(v1));
}

TEST_CASE("distribution score averages per class and flags mismatches") {
    Rng rng(519);
    const int per = 30;
    PointBatch gen, ref;
    gen.data.resize(2 * per, 2);
    ref.data.resize(2 * per, 2);
    IntVector labels(2 * per);
    for (int i = 0; i < per; ++i) {
        labels(i) = 0;
        labels(per + i) = 1;
    }
    for (int i = 0; i < per; ++i) {
        gen.data(i, 0) = rng.normal();
        gen.data(i, 1) = rng.normal();
        gen.data(per + i, 0) = 5.0 + rng.normal();
        gen.data(per + i, 1) = rng.normal();
    }
    ref.data = gen.data;
    for (int i = 0; i < per; ++i) ref.data(i, 0) += 1.0;        // class 0 shift 1
    for (int i = 0; i < per; ++i) ref.data(per + i, 1) += 3.0;  // class 1 shift 3
    gen.labels = labels;
    ref.labels = labels;

    const double got = emd_to_target(gen, ref);
    const double want =
        0.5 * (exact_w2(gen.data.topRows(per), ref.data.topRows(per)).w2_squared +
               exact_w2(gen.data.bottomRows(per), ref.data.bottomRows(per)).w2_squared);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
    CHECK(got == doctest::Approx(0.5 * (1.0 + 9.0)).epsilon(1e-10));

    // a class entirely absent from one side is an error naming the class
    PointBatch skewed = gen;
    IntVector all_zero(2 * per);
    all_zero.setZero();
    skewed.labels = all_zero;
    CHECK_THROWS_AS(emd_to_target(skewed, ref), metric_error);
    try {
        emd_to_target(skewed, ref);
    } catch (const metric_error& e) {
        CHECK(std::string(e.what()).find("1") != std::string::npos);
    }

    PointBatch unlabeled = gen;
    unlabeled.labels.reset();
    CHECK_THROWS_AS(emd_to_target(unlabeled, ref), metric_error);
}

TEST_CASE("distribution score caps the matcher size") {
    Rng rng(523);
    PointBatch gen, ref;
    gen.data = random_cloud(1100, rng);
    ref.data = gen.data;
    // over budget the two sides subsample independently, so the score is a
    // small positive number rather than an exact zero
    const double v = emd_to_target(gen, ref, 3);
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
    CHECK(v < 0.5);
    CHECK(emd_to_target(gen, ref, 3) == v);
}
