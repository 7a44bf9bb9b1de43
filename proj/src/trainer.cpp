#include "driftflow/trainer.hpp"

#include "driftflow/errors.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace driftflow {

void TrainConfig::validate(const DatasetSpec& dataset) const {
    dataset.validate();
    drift.validate();
    time_sampler.validate();
    embed.validate();
    if (G < 1) throw argument_error("TrainConfig: G must be >= 1");
    if (B < 1) throw argument_error("TrainConfig: B must be >= 1");
    if (steps < 0) throw argument_error("TrainConfig: steps must be >= 0");
    if (!(lr > 0.0) || !std::isfinite(lr))
        throw argument_error("TrainConfig: lr must be positive");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
        throw argument_error("TrainConfig: betas must lie in [0, 1)");
    if (!(eps > 0.0)) throw argument_error("TrainConfig: eps must be positive");
    if (hidden < 1) throw argument_error("TrainConfig: hidden must be >= 1");
    if (conditional) {
        if (dataset.class_count < 2)
            throw argument_error("TrainConfig: conditional training needs a dataset "
                                 "with at least 2 classes");
        if (B % dataset.class_count != 0)
            throw argument_error("TrainConfig: B must be divisible by class_count");
        if (B / dataset.class_count < 2)
            throw argument_error("TrainConfig: conditional cells need at least 2 "
                                 "rows per class");
    }
}

double dfm_step(TransportNet& net, AdamState& opt, const GroupedBatch& batch,
                const DriftConfig& drift, double* mean_v_out) {
    if (batch.G < 1 || batch.B < 1)
        throw argument_error("dfm_step: batch must have G >= 1 and B >= 1");
    if (static_cast<int>(batch.pairs.size()) != batch.G)
        throw argument_error("dfm_step: pairs size does not match G");
    const long n = batch.rows();
    if (batch.x_t.rows() != n || batch.x_r.rows() != n ||
        batch.x_t.cols() != batch.x_r.cols())
        throw argument_error("dfm_step: state shapes do not match G*B");
    if (batch.x_t.cols() != net.data_dim)
        throw argument_error("dfm_step: state dimension does not match the net");

    Vector t(n), r(n);
    for (int g = 0; g < batch.G; ++g) {
        t.segment(static_cast<long>(g) * batch.B, batch.B).setConstant(batch.pairs[g].t);
        r.segment(static_cast<long>(g) * batch.B, batch.B).setConstant(batch.pairs[g].r);
    }

    const IntVector* labels = batch.labels ? &*batch.labels : nullptr;
    if (labels && labels->size() != n)
        throw argument_error("dfm_step: label count does not match G*B");

    Matrix xhat = transport(net, batch.x_t, t, r, labels);

    // A conditional net splits every group into per-class cells so the drift
    // never pairs predictions across classes. The batch must be laid out
    // class-major inside each group with equal cell sizes.
    int cells = batch.G;
    if (net.class_count > 0) {
        if (!labels)
            throw argument_error("dfm_step: conditional net requires batch labels");
        const int C = net.class_count;
        if (batch.B % C != 0)
            throw argument_error("dfm_step: B must be divisible by class_count");
        const int rpc = batch.B / C;
        if (rpc < 2)
            throw argument_error("dfm_step: class cells need at least 2 rows");
        for (int g = 0; g < batch.G; ++g)
            for (int c = 0; c < C; ++c)
                for (int k = 0; k < rpc; ++k)
                    if ((*labels)[static_cast<long>(g) * batch.B + c * rpc + k] != c)
                        throw argument_error(
                            "dfm_step: conditional batch must be stratified "
                            "class-major within each group");
        cells = batch.G * C;
    }

    DriftOutput dv = grouped_drift(xhat, batch.x_r, xhat, cells, drift);
    if (mean_v_out) *mean_v_out = dv.V.rowwise().norm().mean();

    Matrix target = drift_target(xhat, dv);
    double loss = 0.0;
    Vector grads = backward_mse(net, batch.x_t, t, r, target, labels, &loss);
    adam_step(opt, net.params, grads);
    return loss;
}

double fm_step(TransportNet& net, AdamState& opt, const Matrix& x0, const Matrix& x1,
               const Vector& t, const IntVector* labels, double* mean_v_out) {
    const long n = x0.rows();
    if (x1.rows() != n || x1.cols() != x0.cols())
        throw argument_error("fm_step: endpoint shapes do not match");
    if (t.size() != n) throw argument_error("fm_step: time count does not match rows");
    if (x0.cols() != net.data_dim)
        throw argument_error("fm_step: state dimension does not match the net");
    for (long i = 0; i < n; ++i)
        if (!(t[i] >= 0.0 && t[i] <= 1.0))
            throw argument_error("fm_step: times must lie in [0, 1]");

    const Schedule schedule;
    Matrix x_t(n, x0.cols());
    for (long i = 0; i < n; ++i)
        x_t.row(i) = schedule.alpha(t[i]) * x0.row(i) + schedule.beta(t[i]) * x1.row(i);

    Matrix target = x1 - x0;
    double loss = 0.0;
    Vector grads = backward_head_mse(net, x_t, t, t, target, labels, &loss);
    adam_step(opt, net.params, grads);
    if (mean_v_out) *mean_v_out = std::sqrt(2.0 * loss);
    return loss;
}

double drift_model_step(TransportNet& net, AdamState& opt, const Matrix& x0,
                        const Matrix& x1, const DriftConfig& drift,
                        const IntVector* labels, double* mean_v_out) {
    GroupedBatch batch;
    batch.G = 1;
    batch.B = static_cast<int>(x0.rows());
    batch.pairs = {TimePair{0.0, 1.0}};
    batch.x_t = x0;
    batch.x_r = x1;
    if (labels) batch.labels = *labels;
    return dfm_step(net, opt, batch, drift, mean_v_out);
}

namespace {

// Rows laid out group-major, class-major inside each group, so that every
// (group, class) cell is contiguous with exactly B/C rows.
PointBatch stratified_target(const DatasetSpec& spec, int groups, int B,
                             std::uint64_t seed) {
    const int C = spec.class_count;
    const int rpc = B / C;
    std::vector<PointBatch> per_class(static_cast<size_t>(C));
    for (int c = 0; c < C; ++c)
        per_class[static_cast<size_t>(c)] =
            sample_target_class(spec, c, groups * rpc, derive_seed(seed, 16 + static_cast<std::uint64_t>(c)));

    PointBatch out;
    out.data.resize(static_cast<long>(groups) * B, 2);
    IntVector labels(static_cast<long>(groups) * B);
    for (int g = 0; g < groups; ++g)
        for (int c = 0; c < C; ++c)
            for (int k = 0; k < rpc; ++k) {
                const long row = static_cast<long>(g) * B + static_cast<long>(c) * rpc + k;
                out.data.row(row) = per_class[static_cast<size_t>(c)].data.row(
                    static_cast<long>(g) * rpc + k);
                labels[row] = c;
            }
    out.labels = std::move(labels);
    return out;
}

} // namespace

TrainResult train(const TrainConfig& config, const SourceSpec& source,
                  const DatasetSpec& target) {
    source.validate();
    config.validate(target);

    const auto t_begin = std::chrono::steady_clock::now();

    const int class_count = config.conditional ? target.class_count : 0;
    TrainResult out{TransportNet::init(2, config.hidden, config.embed,
                                       config.parameterization, class_count,
                                       config.seed),
                    AdamState{}, TrainReport{}};
    out.opt = AdamState::init(out.net.param_count(), config.lr, config.beta1,
                              config.beta2, config.eps);
    out.report.loss.reserve(static_cast<size_t>(config.steps));
    out.report.mean_drift_norm.reserve(static_cast<size_t>(config.steps));

    const int groups = config.method == Method::drift_model ? 1 : config.G;
    const long n = static_cast<long>(groups) * config.B;

    const std::uint64_t train_root = derive_seed(config.seed, 0x5452);
    for (long step = 0; step < config.steps; ++step) {
        const std::uint64_t s = derive_seed(train_root, static_cast<std::uint64_t>(step));

        PointBatch x0 = sample_source(source, static_cast<int>(n), derive_seed(s, 1));
        PointBatch x1 = config.conditional
                            ? stratified_target(target, groups, config.B, derive_seed(s, 2))
                            : sample_target(target, static_cast<int>(n), derive_seed(s, 2));
        if (!config.conditional) x1.labels.reset();

        double loss = 0.0;
        double mean_v = 0.0;
        try {
            switch (config.method) {
            case Method::dfm: {
                auto pairs = sample_time_pairs(config.time_sampler, groups,
                                               derive_seed(s, 3));
                GroupedBatch batch = build_grouped_batch(x0, x1, pairs, config.B);
                loss = dfm_step(out.net, out.opt, batch, config.drift, &mean_v);
                break;
            }
            case Method::flow_matching: {
                Rng rt(derive_seed(s, 3));
                Vector t(n);
                for (long i = 0; i < n; ++i) t[i] = sample_time(config.time_sampler, rt);
                const IntVector* labels = x1.labels ? &*x1.labels : nullptr;
                loss = fm_step(out.net, out.opt, x0.data, x1.data, t, labels, &mean_v);
                break;
            }
            case Method::drift_model: {
                const IntVector* labels = x1.labels ? &*x1.labels : nullptr;
                loss = drift_model_step(out.net, out.opt, x0.data, x1.data,
                                        config.drift, labels, &mean_v);
                break;
            }
            }
        } catch (const divergence_error& e) {
            char msg[256];
            std::snprintf(msg, sizeof(msg), "%s (training step %ld)", e.what(), step);
            throw divergence_error(msg, step);
        }
        if (!std::isfinite(loss))
            throw divergence_error("training diverged: non-finite loss", step);

        out.report.loss.push_back(loss);
        out.report.mean_drift_norm.push_back(mean_v);
    }

    out.report.wall_time_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    return out;
}

void write_report_csv(const TrainReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << "step,loss,mean_drift_norm\n";
    for (size_t i = 0; i < report.loss.size(); ++i)
        out << i << ',' << format_double(report.loss[i]) << ','
            << format_double(report.mean_drift_norm[i]) << '\n';
    out.flush();
    if (!out) throw io_error("write failed: " + path);
}

} // namespace driftflow
