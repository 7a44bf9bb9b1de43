#include <doctest.h>

#include "driftflow/errors.hpp"
#include "driftflow/rng.hpp"
#include "driftflow/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

using namespace driftflow;

namespace {

Matrix random_points(int n, int d, Rng& rng, double extent = 1.5) {
    Matrix out(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) out(i, j) = extent * (2.0 * rng.uniform() - 1.0);
    return out;
}

// Long-double soft-weight drift for cells of equal size, queries doubling as
// the negative set; mirrors only the documented behavior, not the code.
Matrix brute_drift(const Matrix& queries, const Matrix& pos, int cells,
                   const DriftConfig& cfg) {
    const int B = static_cast<int>(queries.rows()) / cells;
    const int d = static_cast<int>(queries.cols());
    Matrix V(queries.rows(), d);
    for (int g = 0; g < cells; ++g)
        for (int b = 0; b < B; ++b) {
            const int row = g * B + b;
            for (int side = 0; side < 2; ++side) {
                const Matrix& pts = side == 0 ? pos : queries;
                const long double tau = side == 0 ? cfg.kernel.tau : cfg.neg_tau();
                std::vector<long double> w(static_cast<size_t>(B));
                long double sum = 0.0L;
                for (int j = 0; j < B; ++j) {
                    long double sq = 0.0L;
                    for (int k = 0; k < d; ++k) {
                        const long double diff = static_cast<long double>(queries(row, k)) -
                                                 pts(g * B + j, k);
                        sq += diff * diff;
                    }
                    const long double cost =
                        cfg.kernel.cost == CostKind::sq_euclid_half ? 0.5L * sq
                                                                    : std::sqrt(sq);
                    w[static_cast<size_t>(j)] = std::exp(-cost / tau);
                    sum += w[static_cast<size_t>(j)];
                }
                for (int k = 0; k < d; ++k) {
                    long double mean = 0.0L;
                    for (int j = 0; j < B; ++j)
                        mean += w[static_cast<size_t>(j)] / sum *
                                static_cast<long double>(pts(g * B + j, k));
                    if (side == 0)
                        V(row, k) = static_cast<double>(mean);
                    else
                        V(row, k) -= static_cast<double>(mean);
                }
            }
        }
    return V;
}

TransportNet small_net(int hidden, Parameterization param, int class_count,
                       std::uint64_t seed, double jitter = 0.2) {
    TimeEmbedSpec embed;
    embed.fourier_features = 2;
    TransportNet net = TransportNet::init(2, hidden, embed, param, class_count, seed);
    if (jitter > 0.0) {
        Rng rng(derive_seed(seed, 99));
        for (long i = 0; i < net.params.size(); ++i)
            net.params(i) += jitter * (2.0 * rng.uniform() - 1.0);
    }
    return net;
}

} // namespace

TEST_CASE("grouped step composes transport, drift, and regression") {
    Rng rng(301);
    const int G = 2, B = 5;
    GroupedBatch batch;
    batch.G = G;
    batch.B = B;
    batch.pairs = {TimePair{0.1, 0.6}, TimePair{0.3, 0.9}};
    batch.x_t = random_points(G * B, 2, rng);
    batch.x_r = random_points(G * B, 2, rng);

    TransportNet net = small_net(8, Parameterization::mean_velocity, 0, 41);
    AdamState opt = AdamState::init(net.param_count());
    const Vector before = net.params;

    Vector t(G * B), r(G * B);
    for (int g = 0; g < G; ++g)
        for (int b = 0; b < B; ++b) {
            t(g * B + b) = batch.pairs[static_cast<size_t>(g)].t;
            r(g * B + b) = batch.pairs[static_cast<size_t>(g)].r;
        }
    DriftConfig drift;
    drift.kernel.tau = 0.8;

    // expected loss: the residual against the frozen target is exactly -V
    const Matrix xhat = transport(net, batch.x_t, t, r);
    const Matrix V = brute_drift(xhat, batch.x_r, G, drift);
    const Matrix resid = xhat - (xhat + V);
    const double want_loss = resid.squaredNorm() / (2.0 * G * B);
    const double want_mean_v = V.rowwise().norm().mean();

    double mean_v = 0.0;
    const double loss = dfm_step(net, opt, batch, drift, &mean_v);
    CHECK(loss == doctest::Approx(want_loss).epsilon(1e-10));
    CHECK(mean_v == doctest::Approx(want_mean_v).epsilon(1e-10));
    CHECK(opt.step == 1);
    CHECK((net.params - before).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("a perfectly matched prediction is a fixed point") {
    Rng rng(303);
    GroupedBatch batch;
    batch.G = 1;
    batch.B = 6;
    batch.pairs = {TimePair{0.2, 0.9}};
    batch.x_t = random_points(6, 2, rng);
    batch.x_r = Matrix::Zero(6, 2);

    // a zero-initialized direct-state head predicts exactly x_r = 0, the
    // positive and negative sides coincide, and the gradient vanishes
    TransportNet net = small_net(8, Parameterization::direct_state, 0, 43, 0.0);
    AdamState opt = AdamState::init(net.param_count());
    const Vector before = net.params;

    double mean_v = -1.0;
    const double loss = dfm_step(net, opt, batch, DriftConfig{}, &mean_v);
    CHECK(loss == 0.0);
    CHECK(mean_v == 0.0);
    CHECK((net.params - before).cwiseAbs().maxCoeff() == 0.0);
    CHECK(opt.step == 1);
}

TEST_CASE("single-row groups regress straight onto the far state") {
    Rng rng(305);
    const int G = 3;
    GroupedBatch batch;
    batch.G = G;
    batch.B = 1;
    batch.pairs = {TimePair{0.0, 1.0}, TimePair{0.2, 0.5}, TimePair{0.4, 0.8}};
    batch.x_t = random_points(G, 2, rng);
    batch.x_r = random_points(G, 2, rng);

    TransportNet net_a = small_net(8, Parameterization::mean_velocity, 0, 47);
    TransportNet net_b = net_a;
    AdamState opt_a = AdamState::init(net_a.param_count());
    AdamState opt_b = AdamState::init(net_b.param_count());

    const double loss_a = dfm_step(net_a, opt_a, batch, DriftConfig{});

    Vector t(G), r(G);
    for (int g = 0; g < G; ++g) {
        t(g) = batch.pairs[static_cast<size_t>(g)].t;
        r(g) = batch.pairs[static_cast<size_t>(g)].r;
    }
    const Matrix xhat = transport(net_b, batch.x_t, t, r);
    const Matrix target = xhat + (batch.x_r - xhat);
    double loss_b = 0.0;
    Vector grads = backward_mse(net_b, batch.x_t, t, r, target, nullptr, &loss_b);
    adam_step(opt_b, net_b.params, grads);

    CHECK(loss_a == loss_b);
    CHECK((net_a.params - net_b.params).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("velocity baseline step has a closed-form toy case") {
    TransportNet net = TransportNet::init(2, 8, {}, Parameterization::mean_velocity, 0, 3);
    net.params.setZero();
    net.params(net.param_count() - 2) = 1.0;  // constant head (1, 0)
    AdamState opt = AdamState::init(net.param_count());
    const Vector before = net.params;

    Matrix x0 = Matrix::Zero(3, 2);
    Matrix x1(3, 2);
    x1 << 2, 0, 2, 0, 2, 0;
    Vector t(3);
    t << 0.3, 0.5, 0.7;

    double mean_v = 0.0;
    const double loss = fm_step(net, opt, x0, x1, t, nullptr, &mean_v);
    // head (1,0) vs displacement (2,0): residual (-1,0) on every row
    CHECK(loss == 0.5);
    CHECK(mean_v == 1.0);

    // with zeroed hidden layers only the head bias receives gradient
    Vector delta = net.params - before;
    for (long i = 0; i < delta.size() - 2; ++i) CHECK(delta(i) == 0.0);
    CHECK(delta(delta.size() - 1) == 0.0);
    CHECK(delta(delta.size() - 2) == doctest::Approx(opt.lr).epsilon(1e-7));
}

TEST_CASE("velocity baseline is invariant to row order") {
    Rng rng(307);
    const int n = 12;
    Matrix x0 = random_points(n, 2, rng);
    Matrix x1 = random_points(n, 2, rng);
    Vector t(n);
    for (int i = 0; i < n; ++i) t(i) = rng.uniform();

    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = (i * 5 + 3) % n;
    Matrix px0(n, 2), px1(n, 2);
    Vector pt(n);
    for (int i = 0; i < n; ++i) {
        px0.row(i) = x0.row(perm[static_cast<size_t>(i)]);
        px1.row(i) = x1.row(perm[static_cast<size_t>(i)]);
        pt(i) = t(perm[static_cast<size_t>(i)]);
    }

    TransportNet net_a = small_net(8, Parameterization::mean_velocity, 0, 53);
    TransportNet net_b = net_a;
    AdamState opt_a = AdamState::init(net_a.param_count());
    AdamState opt_b = AdamState::init(net_b.param_count());
    const double loss_a = fm_step(net_a, opt_a, x0, x1, t);
    const double loss_b = fm_step(net_b, opt_b, px0, px1, pt);
    CHECK(loss_a == doctest::Approx(loss_b).epsilon(1e-12));
    CHECK((net_a.params - net_b.params).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("one-step baseline is the full-interval grouped step") {
    Rng rng(309);
    const int n = 7;
    Matrix x0 = random_points(n, 2, rng);
    Matrix x1 = random_points(n, 2, rng);
    DriftConfig drift;
    drift.kernel.tau = 1.2;

    TransportNet net_a = small_net(10, Parameterization::direct_state, 0, 59);
    TransportNet net_b = net_a;
    AdamState opt_a = AdamState::init(net_a.param_count());
    AdamState opt_b = AdamState::init(net_b.param_count());

    double mv_a = 0.0, mv_b = 0.0;
    const double loss_a = drift_model_step(net_a, opt_a, x0, x1, drift, nullptr, &mv_a);

    GroupedBatch batch;
    batch.G = 1;
    batch.B = n;
    batch.pairs = {TimePair{0.0, 1.0}};
    batch.x_t = x0;
    batch.x_r = x1;
    const double loss_b = dfm_step(net_b, opt_b, batch, drift, &mv_b);

    CHECK(loss_a == loss_b);
    CHECK(mv_a == mv_b);
    CHECK((net_a.params - net_b.params).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("conditional steps keep drift inside class cells") {
    Rng rng(311);
    const int G = 2, C = 2, rpc = 3, B = C * rpc;
    GroupedBatch batch;
    batch.G = G;
    batch.B = B;
    batch.pairs = {TimePair{0.1, 0.7}, TimePair{0.2, 0.8}};
    batch.x_t = random_points(G * B, 2, rng);
    batch.x_r = random_points(G * B, 2, rng);
    IntVector labels(G * B);
    for (int g = 0; g < G; ++g)
        for (int c = 0; c < C; ++c)
            for (int k = 0; k < rpc; ++k) labels(g * B + c * rpc + k) = c;
    batch.labels = labels;

    TransportNet net_a = small_net(8, Parameterization::mean_velocity, C, 61);
    TransportNet net_b = net_a;
    AdamState opt_a = AdamState::init(net_a.param_count());
    AdamState opt_b = AdamState::init(net_b.param_count());

    const double loss_a = dfm_step(net_a, opt_a, batch, DriftConfig{});

    // manual recomposition with one drift cell per (group, class) block
    Vector t(G * B), r(G * B);
    for (int g = 0; g < G; ++g)
        for (int b = 0; b < B; ++b) {
            t(g * B + b) = batch.pairs[static_cast<size_t>(g)].t;
            r(g * B + b) = batch.pairs[static_cast<size_t>(g)].r;
        }
    const Matrix xhat = transport(net_b, batch.x_t, t, r, &labels);
    DriftOutput dv = grouped_drift(xhat, batch.x_r, xhat, G * C, DriftConfig{});
    const Matrix target = drift_target(xhat, dv);
    double loss_b = 0.0;
    Vector grads = backward_mse(net_b, batch.x_t, t, r, target, &labels, &loss_b);
    adam_step(opt_b, net_b.params, grads);

    CHECK(loss_a == loss_b);
    CHECK((net_a.params - net_b.params).cwiseAbs().maxCoeff() == 0.0);

    // order violations inside a cell are rejected
    GroupedBatch bad = batch;
    IntVector swapped = labels;
    std::swap(swapped(0), swapped(rpc));  // first rows of the two class cells
    bad.labels = swapped;
    TransportNet net_c = small_net(8, Parameterization::mean_velocity, C, 61);
    AdamState opt_c = AdamState::init(net_c.param_count());
    CHECK_THROWS_AS(dfm_step(net_c, opt_c, bad, DriftConfig{}), argument_error);

    GroupedBatch unlabeled = batch;
    unlabeled.labels.reset();
    CHECK_THROWS_AS(dfm_step(net_c, opt_c, unlabeled, DriftConfig{}), argument_error);
}

TEST_CASE("grouped step validates batch shape") {
    Rng rng(313);
    TransportNet net = small_net(8, Parameterization::mean_velocity, 0, 67);
    AdamState opt = AdamState::init(net.param_count());

    GroupedBatch batch;
    batch.G = 2;
    batch.B = 3;
    batch.pairs = {TimePair{0.1, 0.5}};  // wrong pair count
    batch.x_t = random_points(6, 2, rng);
    batch.x_r = random_points(6, 2, rng);
    CHECK_THROWS_AS(dfm_step(net, opt, batch, DriftConfig{}), argument_error);

    batch.pairs = {TimePair{0.1, 0.5}, TimePair{0.2, 0.6}};
    batch.x_t = random_points(5, 2, rng);  // rows != G*B
    CHECK_THROWS_AS(dfm_step(net, opt, batch, DriftConfig{}), argument_error);

    CHECK_THROWS_AS(fm_step(net, opt, Matrix::Zero(3, 2), Matrix::Zero(4, 2),
                            Vector::Zero(3)),
                    argument_error);
    Vector bad_t(3);
    bad_t << 0.1, 1.5, 0.3;
    CHECK_THROWS_AS(fm_step(net, opt, Matrix::Zero(3, 2), Matrix::Zero(3, 2), bad_t),
                    argument_error);
}

TEST_CASE("training config rejects invalid combinations") {
    DatasetSpec moons = default_dataset(DatasetName::two_moons);
    TrainConfig cfg;
    CHECK_NOTHROW(cfg.validate(moons));

    TrainConfig bad = cfg;
    bad.lr = 0.0;
    CHECK_THROWS_AS(bad.validate(moons), argument_error);
    bad = cfg;
    bad.steps = -1;
    CHECK_THROWS_AS(bad.validate(moons), argument_error);
    bad = cfg;
    bad.G = 0;
    CHECK_THROWS_AS(bad.validate(moons), argument_error);
    bad = cfg;
    bad.beta1 = 1.0;
    CHECK_THROWS_AS(bad.validate(moons), argument_error);

    TrainConfig cond = cfg;
    cond.conditional = true;
    CHECK_THROWS_AS(cond.validate(moons), argument_error);  // unlabeled dataset

    DatasetSpec labeled = moons;
    labeled.class_count = 2;
    cond.B = 7;
    CHECK_THROWS_AS(cond.validate(labeled), argument_error);  // not divisible
    cond.B = 2;
    CHECK_THROWS_AS(cond.validate(labeled), argument_error);  // one row per cell
    cond.B = 8;
    CHECK_NOTHROW(cond.validate(labeled));
}

TEST_CASE("zero-step training returns the fresh network") {
    TrainConfig cfg;
    cfg.steps = 0;
    cfg.hidden = 12;
    cfg.seed = 77;
    SourceSpec source;
    DatasetSpec moons = default_dataset(DatasetName::two_moons);

    TrainResult result = train(cfg, source, moons);
    CHECK(result.report.loss.empty());
    CHECK(result.report.mean_drift_norm.empty());
    CHECK(result.opt.step == 0);

    TransportNet fresh = TransportNet::init(2, cfg.hidden, cfg.embed,
                                            cfg.parameterization, 0, cfg.seed);
    CHECK((result.net.params - fresh.params).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("training is bitwise deterministic in the seed") {
    TrainConfig cfg;
    cfg.G = 2;
    cfg.B = 8;
    cfg.steps = 5;
    cfg.hidden = 16;
    cfg.seed = 123;
    SourceSpec source;
    DatasetSpec moons = default_dataset(DatasetName::two_moons);

    TrainResult a = train(cfg, source, moons);
    TrainResult b = train(cfg, source, moons);
    REQUIRE(a.report.loss.size() == 5);
    CHECK((a.net.params - b.net.params).cwiseAbs().maxCoeff() == 0.0);
    for (size_t i = 0; i < 5; ++i) {
        CHECK(a.report.loss[i] == b.report.loss[i]);
        CHECK(a.report.mean_drift_norm[i] == b.report.mean_drift_norm[i]);
    }

    cfg.seed = 124;
    TrainResult c = train(cfg, source, moons);
    CHECK((a.net.params - c.net.params).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("all three methods run conditionally and unconditionally") {
    SourceSpec source;
    DatasetSpec board = default_dataset(DatasetName::checkerboard);
    board.class_count = 4;

    for (Method method : {Method::dfm, Method::flow_matching, Method::drift_model}) {
        for (bool conditional : {false, true}) {
            TrainConfig cfg;
            cfg.method = method;
            cfg.conditional = conditional;
            cfg.G = 2;
            cfg.B = 8;
            cfg.steps = 3;
            cfg.hidden = 16;
            cfg.seed = 5;
            TrainResult result = train(cfg, source, board);
            CAPTURE(static_cast<int>(method));
            CAPTURE(conditional);
            REQUIRE(result.report.loss.size() == 3);
            for (double v : result.report.loss) CHECK(std::isfinite(v));
            CHECK(result.net.class_count == (conditional ? 4 : 0));
            CHECK(result.opt.step == 3);
            CHECK(result.report.wall_time_sec >= 0.0);
        }
    }
}

TEST_CASE("a divergent run reports the failing step") {
    // the normalized optimizer update is bounded by lr, so only an enormous
    // rate pushes the activations past the overflow threshold
    TrainConfig cfg;
    cfg.G = 1;
    cfg.B = 4;
    cfg.steps = 20;
    cfg.hidden = 8;
    cfg.lr = 1e200;
    SourceSpec source;
    DatasetSpec moons = default_dataset(DatasetName::two_moons);

    CHECK_THROWS_AS(train(cfg, source, moons), divergence_error);
    try {
        train(cfg, source, moons);
        FAIL("expected divergence");
    } catch (const divergence_error& e) {
        CHECK(e.step >= 0);
        CHECK(e.step < 20);
    }
}

TEST_CASE("drift magnitude shrinks while learning a gaussian widening") {
    TrainConfig cfg;
    cfg.G = 2;
    cfg.B = 16;
    cfg.steps = 1500;
    cfg.hidden = 32;
    cfg.seed = 9;
    SourceSpec source{SourceKind::gaussian_iso, 1.0};
    DatasetSpec target;
    target.name = DatasetName::gaussian_iso;
    target.scale = 2.0;

    TrainResult result = train(cfg, source, target);
    const auto& mv = result.report.mean_drift_norm;
    double head = 0.0, tail = 0.0;
    for (int i = 0; i < 50; ++i) {
        head += mv[static_cast<size_t>(i)];
        tail += mv[mv.size() - 50 + static_cast<size_t>(i)];
    }
    CHECK(tail < head);
    double head_loss = 0.0, tail_loss = 0.0;
    for (int i = 0; i < 50; ++i) {
        head_loss += result.report.loss[static_cast<size_t>(i)];
        tail_loss += result.report.loss[result.report.loss.size() - 50 + static_cast<size_t>(i)];
    }
    CHECK(tail_loss < head_loss);
}

TEST_CASE("report csv serializes the histories") {
    TrainReport report;
    report.loss = {0.5, 0.25, 1.0 / 3.0};
    report.mean_drift_norm = {1.0, 0.7071067811865476, 0.1};
    std::filesystem::create_directories("tmp_train");
    const std::string path = "tmp_train/report.csv";
    write_report_csv(report, path);

    std::FILE* f = std::fopen(path.c_str(), "rb");
    REQUIRE(f != nullptr);
    char line[256];
    REQUIRE(std::fgets(line, sizeof(line), f) != nullptr);
    CHECK(std::string(line) == "step,loss,mean_drift_norm\n");
    for (int i = 0; i < 3; ++i) {
        REQUIRE(std::fgets(line, sizeof(line), f) != nullptr);
        int step = -1;
        double loss = 0.0, mv = 0.0;
        REQUIRE(std::sscanf(line, "%d,%lf,%lf", &step, &loss, &mv) == 3);
        CHECK(step == i);
        CHECK(loss == report.loss[static_cast<size_t>(i)]);
        CHECK(mv == report.mean_drift_norm[static_cast<size_t>(i)]);
    }
    CHECK(std::fgets(line, sizeof(line), f) == nullptr);
    std::fclose(f);
}
