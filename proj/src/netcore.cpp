#include "driftflow/netcore.hpp"

#include "driftflow/errors.hpp"
#include "driftflow/rng.hpp"

#include <cmath>
#include <numbers>

namespace driftflow {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }
double swish(double z) { return z * sigmoid(z); }
double swish_grad(double z) {
    const double s = sigmoid(z);
    return s + z * s * (1.0 - s);
}

// Mutable/const views into the flat parameter vector. Layout:
// W1 (h x in), b1, W2 (h x h), b2, W3 (d x h), b3.
template <typename Vec, typename MatMap, typename VecMap>
struct ViewsT {
    MatMap W1, W2, W3;
    VecMap b1, b2, b3;

    ViewsT(Vec& p, int in, int h, int d)
        : W1(p.data(), h, in),
          W2(p.data() + h * in + h, h, h),
          W3(p.data() + h * in + h + h * h + h, d, h),
          b1(p.data() + h * in, h),
          b2(p.data() + h * in + h + h * h, h),
          b3(p.data() + h * in + h + h * h + h + d * h, d) {}
};

using Views = ViewsT<Vector, Eigen::Map<Matrix>, Eigen::Map<Vector>>;
using ConstViews =
    ViewsT<const Vector, Eigen::Map<const Matrix>, Eigen::Map<const Vector>>;

struct ForwardCache {
    Matrix A0, Z1, A1, Z2, A2, head;
};

void fill_input_row(const TransportNet& net, const Matrix& x, long i, double t,
                    double r, const IntVector* labels, Matrix& A0) {
    const int d = net.data_dim;
    for (int j = 0; j < d; ++j) A0(i, j) = x(i, j);
    const Vector e = embed_time(t, r, net.embed);
    for (long j = 0; j < e.size(); ++j) A0(i, d + j) = e(j);
    if (net.class_count > 0) {
        const int base = d + static_cast<int>(e.size());
        for (int c = 0; c < net.class_count; ++c) A0(i, base + c) = 0.0;
        const int lab = (*labels)(i);
        if (lab < 0 || lab >= net.class_count)
            throw argument_error("forward: label out of range");
        A0(i, base + lab) = 1.0;
    }
}

Matrix forward_impl(const TransportNet& net, const Matrix& x, const Vector& t,
                    const Vector& r, const IntVector* labels, ForwardCache* cache) {
    const long B = x.rows();
    if (x.cols() != net.data_dim) throw argument_error("forward: wrong data dimension");
    if (t.size() != B || r.size() != B)
        throw argument_error("forward: time vector length must match batch");
    if (net.class_count > 0 && (labels == nullptr || labels->size() != B))
        throw argument_error("forward: conditional net needs one label per row");
    if (!x.allFinite()) throw divergence_error("forward: non-finite input");

    const int in = net.input_dim(), h = net.hidden, d = net.data_dim;
    ConstViews w(net.params, in, h, d);

    Matrix A0(B, in);
    for (long i = 0; i < B; ++i) fill_input_row(net, x, i, t(i), r(i), labels, A0);

    Matrix Z1 = (A0 * w.W1.transpose()).rowwise() + w.b1.transpose();
    Matrix A1 = Z1.unaryExpr([](double z) { return swish(z); });
    Matrix Z2 = (A1 * w.W2.transpose()).rowwise() + w.b2.transpose();
    Matrix A2 = Z2.unaryExpr([](double z) { return swish(z); });
    Matrix head = (A2 * w.W3.transpose()).rowwise() + w.b3.transpose();

    if (!head.allFinite())
        throw divergence_error("forward: non-finite activations");

    if (cache) {
        cache->A0 = std::move(A0);
        cache->Z1 = std::move(Z1);
        cache->A1 = std::move(A1);
        cache->Z2 = std::move(Z2);
        cache->A2 = std::move(A2);
        cache->head = head;
    }
    return head;
}

Vector constant_times(long B, double v) { return Vector::Constant(B, v); }

void check_pair_order(const Vector& t, const Vector& r) {
    for (long i = 0; i < t.size(); ++i)
        if (t(i) > r(i)) throw argument_error("transport: requires t <= r");
}

Matrix apply_transport(const TransportNet& net, const Matrix& x, const Vector& t,
                       const Vector& r, const Matrix& head) {
    if (net.parameterization == Parameterization::direct_state) return head;
    Matrix out = x;
    for (long i = 0; i < x.rows(); ++i) out.row(i) += (r(i) - t(i)) * head.row(i);
    return out;
}

Vector backward_impl(const TransportNet& net, const Matrix& x, const Vector& t,
                     const Vector& r, const Matrix& target, const IntVector* labels,
                     bool regress_head, double* loss_out) {
    const long B = x.rows();
    if (target.rows() != B || target.cols() != net.data_dim)
        throw argument_error("backward_mse: target shape mismatch");

    ForwardCache cache;
    forward_impl(net, x, t, r, labels, &cache);
    const Matrix pred =
        regress_head ? cache.head : apply_transport(net, x, t, r, cache.head);

    const Matrix resid = pred - target;
    if (loss_out) *loss_out = resid.squaredNorm() / (2.0 * static_cast<double>(B));

    // d loss / d pred, then through the (r - t) scale onto the head.
    Matrix dHead = resid / static_cast<double>(B);
    if (!regress_head && net.parameterization == Parameterization::mean_velocity)
        for (long i = 0; i < B; ++i) dHead.row(i) *= (r(i) - t(i));

    const int in = net.input_dim(), h = net.hidden, d = net.data_dim;
    ConstViews w(net.params, in, h, d);

    Vector grads = Vector::Zero(net.params.size());
    Views g(grads, in, h, d);

    g.W3 = dHead.transpose() * cache.A2;
    g.b3 = dHead.colwise().sum();
    Matrix dA2 = dHead * w.W3;
    Matrix dZ2 =
        dA2.array() * cache.Z2.unaryExpr([](double z) { return swish_grad(z); }).array();
    g.W2 = dZ2.transpose() * cache.A1;
    g.b2 = dZ2.colwise().sum();
    Matrix dA1 = dZ2 * w.W2;
    Matrix dZ1 =
        dA1.array() * cache.Z1.unaryExpr([](double z) { return swish_grad(z); }).array();
    g.W1 = dZ1.transpose() * cache.A0;
    g.b1 = dZ1.colwise().sum();
    return grads;
}

} // namespace

void TimeEmbedSpec::validate() const {
    if (fourier_features < 1) throw argument_error("fourier_features must be >= 1");
    if (!(base_freq > 0.0)) throw argument_error("base_freq must be positive");
}

Vector embed_time(double t, double r, const TimeEmbedSpec& spec) {
    spec.validate();
    double scalars[3];
    int count = 0;
    switch (spec.mode) {
        case TimeEmbedSpec::Mode::t_r:
            scalars[count++] = t;
            scalars[count++] = r;
            break;
        case TimeEmbedSpec::Mode::t_dt:
            scalars[count++] = t;
            scalars[count++] = t - r;
            break;
        case TimeEmbedSpec::Mode::t_r_dt:
            scalars[count++] = t;
            scalars[count++] = r;
            scalars[count++] = t - r;
            break;
    }
    Vector out(spec.dim());
    long idx = 0;
    for (int s = 0; s < count; ++s) {
        double freq = 2.0 * std::numbers::pi * spec.base_freq;
        for (int k = 0; k < spec.fourier_features; ++k) {
            out(idx++) = std::sin(freq * scalars[s]);
            out(idx++) = std::cos(freq * scalars[s]);
            freq *= 2.0;
        }
    }
    return out;
}

long TransportNet::param_count() const {
    const long in = input_dim(), h = hidden, d = data_dim;
    return h * in + h + h * h + h + d * h + d;
}

TransportNet TransportNet::init(int data_dim, int hidden, const TimeEmbedSpec& embed,
                                Parameterization parameterization, int class_count,
                                std::uint64_t seed) {
    if (data_dim < 1 || hidden < 1) throw argument_error("net dims must be positive");
    if (class_count < 0) throw argument_error("class_count must be nonnegative");
    embed.validate();

    TransportNet net;
    net.data_dim = data_dim;
    net.hidden = hidden;
    net.class_count = class_count;
    net.embed = embed;
    net.parameterization = parameterization;
    net.params = Vector::Zero(net.param_count());

    Rng rng(derive_seed(seed, 0x4e45u));
    Views w(net.params, net.input_dim(), hidden, data_dim);
    const double s1 = 1.0 / std::sqrt(static_cast<double>(net.input_dim()));
    const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
    for (long i = 0; i < w.W1.size(); ++i) w.W1.data()[i] = rng.uniform(-s1, s1);
    for (long i = 0; i < w.b1.size(); ++i) w.b1(i) = rng.uniform(-s1, s1);
    for (long i = 0; i < w.W2.size(); ++i) w.W2.data()[i] = rng.uniform(-s2, s2);
    for (long i = 0; i < w.b2.size(); ++i) w.b2(i) = rng.uniform(-s2, s2);
    // W3 and b3 stay zero: the initial transport is the identity map.
    return net;
}

Matrix forward(const TransportNet& net, const Matrix& x, double t, double r,
               const IntVector* labels) {
    return forward_impl(net, x, constant_times(x.rows(), t), constant_times(x.rows(), r),
                        labels, nullptr);
}

Matrix forward(const TransportNet& net, const Matrix& x, const Vector& t,
               const Vector& r, const IntVector* labels) {
    return forward_impl(net, x, t, r, labels, nullptr);
}

Matrix transport(const TransportNet& net, const Matrix& x, double t, double r,
                 const IntVector* labels) {
    return transport(net, x, constant_times(x.rows(), t), constant_times(x.rows(), r),
                     labels);
}

Matrix transport(const TransportNet& net, const Matrix& x, const Vector& t,
                 const Vector& r, const IntVector* labels) {
    check_pair_order(t, r);
    const Matrix head = forward_impl(net, x, t, r, labels, nullptr);
    return apply_transport(net, x, t, r, head);
}

Vector backward_mse(const TransportNet& net, const Matrix& x, const Vector& t,
                    const Vector& r, const Matrix& target, const IntVector* labels,
                    double* loss_out) {
    check_pair_order(t, r);
    return backward_impl(net, x, t, r, target, labels, false, loss_out);
}

Vector backward_head_mse(const TransportNet& net, const Matrix& x, const Vector& t,
                         const Vector& r, const Matrix& target, const IntVector* labels,
                         double* loss_out) {
    return backward_impl(net, x, t, r, target, labels, true, loss_out);
}

AdamState AdamState::init(long param_count, double lr, double beta1, double beta2,
                          double eps) {
    AdamState s;
    s.m = Vector::Zero(param_count);
    s.v = Vector::Zero(param_count);
    s.lr = lr;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.eps = eps;
    return s;
}

void adam_step(AdamState& state, Vector& params, const Vector& grads) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw argument_error("adam_step: size mismatch");
    state.step += 1;
    const double b1 = state.beta1, b2 = state.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    for (long i = 0; i < params.size(); ++i) {
        const double gi = grads(i);
        state.m(i) = b1 * state.m(i) + (1.0 - b1) * gi;
        state.v(i) = b2 * state.v(i) + (1.0 - b2) * gi * gi;
        const double mhat = state.m(i) / c1;
        const double vhat = state.v(i) / c2;
        params(i) -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
}

} // namespace driftflow
