#pragma once

#include "driftflow/common.hpp"

#include <cstdint>
#include <optional>

namespace driftflow {

// Sinusoidal features of the two times. Each embedded scalar s expands to
// {sin(2*pi*base_freq*2^k*s), cos(2*pi*base_freq*2^k*s)} for
// k = 0..fourier_features-1.
struct TimeEmbedSpec {
    enum class Mode { t_r, t_dt, t_r_dt } mode = Mode::t_dt;
    int fourier_features = 8;
    double base_freq = 1.0;

    int scalar_count() const {
        return mode == Mode::t_r_dt ? 3 : 2;
    }
    int dim() const { return scalar_count() * 2 * fourier_features; }
    void validate() const;
};

Vector embed_time(double t, double r, const TimeEmbedSpec& spec);

enum class Parameterization { mean_velocity, direct_state };

// 3-layer MLP over [x | time features | one-hot class]:
//   input -> hidden -> hidden -> data_dim, smooth sigmoid-weighted linear
// units between the affine maps. With mean_velocity the head is the mean
// velocity u(x_t, t, r); with direct_state it predicts x_r outright.
struct TransportNet {
    int data_dim = 2;
    int hidden = 256;
    int class_count = 0;  // 0 = unconditional
    TimeEmbedSpec embed;
    Parameterization parameterization = Parameterization::mean_velocity;
    Vector params;

    int input_dim() const { return data_dim + embed.dim() + class_count; }
    long param_count() const;

    // Fan-in-scaled uniform init for the two hidden layers, zero-initialized
    // head so the net starts at u = 0 (identity transport).
    static TransportNet init(int data_dim, int hidden, const TimeEmbedSpec& embed,
                             Parameterization parameterization, int class_count,
                             std::uint64_t seed);
};

// Raw head values, one row per input row. Scalar (t, r) apply to the whole
// batch; the vector overload takes per-row times. labels are required iff
// the net is conditional. Throws divergence_error on non-finite activations.
Matrix forward(const TransportNet& net, const Matrix& x, double t, double r,
               const IntVector* labels = nullptr);
Matrix forward(const TransportNet& net, const Matrix& x, const Vector& t,
               const Vector& r, const IntVector* labels = nullptr);

// The two-time transport map. mean_velocity: x + (r - t) * u(x, t, r);
// direct_state: the head output itself. Requires t <= r per row.
Matrix transport(const TransportNet& net, const Matrix& x, double t, double r,
                 const IntVector* labels = nullptr);
Matrix transport(const TransportNet& net, const Matrix& x, const Vector& t,
                 const Vector& r, const IntVector* labels = nullptr);

// Gradient of (1/(2B)) * sum_i |transport(x_i) - target_i|^2 with respect to
// the parameters, via reverse mode through the three layers, the
// nonlinearity, and the (r - t) scale. The target is a constant. When
// loss_out is given the pre-update loss value is stored there.
Vector backward_mse(const TransportNet& net, const Matrix& x, const Vector& t,
                    const Vector& r, const Matrix& target,
                    const IntVector* labels = nullptr, double* loss_out = nullptr);

// Same, but regressing the raw head values instead of the transport map.
// Used by the Flow Matching baseline, which reads the head as a velocity
// at r = t (where the transport residual would carry no gradient).
Vector backward_head_mse(const TransportNet& net, const Matrix& x, const Vector& t,
                         const Vector& r, const Matrix& target,
                         const IntVector* labels = nullptr,
                         double* loss_out = nullptr);

struct AdamState {
    Vector m;  // first moments
    Vector v;  // second moments
    long step = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    static AdamState init(long param_count, double lr = 1e-3, double beta1 = 0.9,
                          double beta2 = 0.999, double eps = 1e-8);
};

// Standard bias-corrected Adam update, in place.
void adam_step(AdamState& state, Vector& params, const Vector& grads);

} // namespace driftflow
