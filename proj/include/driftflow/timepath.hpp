#pragma once

#include "driftflow/pointbatch.hpp"
#include "driftflow/rng.hpp"

#include <vector>

namespace driftflow {

// Interpolation schedule x_t = alpha(t) x0 + beta(t) x1. Only the linear
// schedule is implemented: alpha = 1 - t, beta = t.
struct Schedule {
    enum class Kind { linear } kind = Kind::linear;

    double alpha(double t) const { return 1.0 - t; }
    double beta(double t) const { return t; }
    double alpha_dot(double) const { return -1.0; }
    double beta_dot(double) const { return 1.0; }
};

// One transport problem index (t, r) with 0 <= t <= r <= 1.
struct TimePair {
    double t = 0.0;
    double r = 1.0;
};

// Orders two raw draws into a valid pair. A tie (t == r) is kept as a
// zero-length interval.
TimePair make_time_pair(double a, double b);

struct TimeSamplerSpec {
    enum class Kind { uniform, lognorm } kind = Kind::lognorm;
    double mu = -0.4;
    double sigma = 1.0;

    void validate() const;
};

// One marginal draw of the sampler: U[0,1] for uniform, sigmoid(N(mu,
// sigma^2)) for lognorm.
double sample_time(const TimeSamplerSpec& spec, Rng& rng);

// G pairs, each built from two independent marginal draws sorted ascending.
std::vector<TimePair> sample_time_pairs(const TimeSamplerSpec& spec, int G, Rng& rng);
std::vector<TimePair> sample_time_pairs(const TimeSamplerSpec& spec, int G,
                                        std::uint64_t seed);

PointBatch interpolate(const PointBatch& x0, const PointBatch& x1, double t,
                       const Schedule& schedule = {});

// G contiguous groups of B rows each; within a group both states come from
// the same endpoint rows, evaluated at that group's t and r.
struct GroupedBatch {
    int G = 0;
    int B = 0;
    std::vector<TimePair> pairs;      // size G
    Matrix x_t;                       // (G*B) x d, group-major rows
    Matrix x_r;                       // (G*B) x d
    std::optional<IntVector> labels;  // size G*B when conditional

    int rows() const { return G * B; }
};

GroupedBatch build_grouped_batch(const PointBatch& x0, const PointBatch& x1,
                                 const std::vector<TimePair>& pairs, int B,
                                 const Schedule& schedule = {});

} // namespace driftflow
