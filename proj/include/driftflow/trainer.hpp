#pragma once

#include "driftflow/driftfield.hpp"
#include "driftflow/netcore.hpp"
#include "driftflow/synthdata.hpp"
#include "driftflow/timepath.hpp"

#include <string>
#include <vector>

namespace driftflow {

enum class Method { dfm, flow_matching, drift_model };

struct TrainConfig {
    Method method = Method::dfm;
    int G = 4;
    int B = 64;
    long steps = 10000;
    DriftConfig drift;
    TimeSamplerSpec time_sampler;
    double lr = 3e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::uint64_t seed = 0;
    bool conditional = false;
    int hidden = 256;
    TimeEmbedSpec embed;
    Parameterization parameterization = Parameterization::mean_velocity;

    void validate(const DatasetSpec& dataset) const;
};

struct TrainReport {
    std::vector<double> loss;             // pre-update loss per step
    std::vector<double> mean_drift_norm;  // mean |V| per step; for the
                                          // flow-matching baseline this column
                                          // holds the RMS regression residual
    double wall_time_sec = 0.0;
    std::string checkpoint_path;
};

// One grouped supervision step: predict x_r from x_t per group, pull the
// predictions toward the grouped drift target (a constant), take an Adam
// step. Returns the pre-update loss; mean_v_out, when given, receives the
// mean drift norm. For a conditional net the batch must be stratified
// class-major so every (group, class) cell is a contiguous block of at least
// two rows; drift never crosses cell boundaries.
double dfm_step(TransportNet& net, AdamState& opt, const GroupedBatch& batch,
                const DriftConfig& drift, double* mean_v_out = nullptr);

// Velocity regression baseline: the head, fed (x_t, t, t), is regressed onto
// the constant displacement x1 - x0 with per-row times.
double fm_step(TransportNet& net, AdamState& opt, const Matrix& x0, const Matrix& x1,
               const Vector& t, const IntVector* labels = nullptr,
               double* mean_v_out = nullptr);

// One-step drift baseline: dfm_step on the single fixed pair (0, 1).
double drift_model_step(TransportNet& net, AdamState& opt, const Matrix& x0,
                        const Matrix& x1, const DriftConfig& drift,
                        const IntVector* labels = nullptr,
                        double* mean_v_out = nullptr);

struct TrainResult {
    TransportNet net;
    AdamState opt;
    TrainReport report;
};

// Runs the configured method for config.steps iterations with fresh endpoint
// draws every step. Bitwise deterministic in (config, source, target).
TrainResult train(const TrainConfig& config, const SourceSpec& source,
                  const DatasetSpec& target);

// Serializes the per-step histories as "step,loss,mean_drift_norm" rows.
void write_report_csv(const TrainReport& report, const std::string& path);

} // namespace driftflow
