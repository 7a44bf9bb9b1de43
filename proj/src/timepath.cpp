#include "driftflow/timepath.hpp"

#include "driftflow/errors.hpp"

#include <cmath>
#include <utility>

namespace driftflow {

TimePair make_time_pair(double a, double b) {
    if (b < a) std::swap(a, b);
    return {a, b};
}

void TimeSamplerSpec::validate() const {
    if (kind == Kind::lognorm && !(sigma > 0.0))
        throw argument_error("time sampler sigma must be positive");
}

double sample_time(const TimeSamplerSpec& spec, Rng& rng) {
    if (spec.kind == TimeSamplerSpec::Kind::uniform) return rng.uniform();
    const double z = rng.normal(spec.mu, spec.sigma);
    return 1.0 / (1.0 + std::exp(-z));
}

std::vector<TimePair> sample_time_pairs(const TimeSamplerSpec& spec, int G, Rng& rng) {
    spec.validate();
    if (G < 1) throw argument_error("sample_time_pairs: G must be >= 1");
    std::vector<TimePair> pairs;
    pairs.reserve(static_cast<size_t>(G));
    for (int g = 0; g < G; ++g) {
        const double a = sample_time(spec, rng);
        const double b = sample_time(spec, rng);
        pairs.push_back(make_time_pair(a, b));
    }
    return pairs;
}

std::vector<TimePair> sample_time_pairs(const TimeSamplerSpec& spec, int G,
                                        std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x7175u));
    return sample_time_pairs(spec, G, rng);
}

PointBatch interpolate(const PointBatch& x0, const PointBatch& x1, double t,
                       const Schedule& schedule) {
    if (x0.data.rows() != x1.data.rows() || x0.data.cols() != x1.data.cols())
        throw argument_error("interpolate: endpoint shapes differ");
    if (!(t >= 0.0 && t <= 1.0)) throw argument_error("interpolate: t outside [0, 1]");
    PointBatch out;
    out.data = schedule.alpha(t) * x0.data + schedule.beta(t) * x1.data;
    if (x1.labeled()) out.labels = x1.labels;
    return out;
}

GroupedBatch build_grouped_batch(const PointBatch& x0, const PointBatch& x1,
                                 const std::vector<TimePair>& pairs, int B,
                                 const Schedule& schedule) {
    const int G = static_cast<int>(pairs.size());
    if (G < 1 || B < 1) throw argument_error("build_grouped_batch: empty grouping");
    if (x0.data.rows() != x1.data.rows() || x0.data.cols() != x1.data.cols())
        throw argument_error("build_grouped_batch: endpoint shapes differ");
    if (x0.data.rows() != static_cast<long>(G) * B)
        throw argument_error("build_grouped_batch: row count must equal G*B");

    GroupedBatch out;
    out.G = G;
    out.B = B;
    out.pairs = pairs;
    out.x_t.resize(x0.data.rows(), x0.data.cols());
    out.x_r.resize(x0.data.rows(), x0.data.cols());
    for (int g = 0; g < G; ++g) {
        const auto rows0 = x0.data.middleRows(static_cast<long>(g) * B, B);
        const auto rows1 = x1.data.middleRows(static_cast<long>(g) * B, B);
        const TimePair& p = pairs[static_cast<size_t>(g)];
        out.x_t.middleRows(static_cast<long>(g) * B, B) =
            schedule.alpha(p.t) * rows0 + schedule.beta(p.t) * rows1;
        out.x_r.middleRows(static_cast<long>(g) * B, B) =
            schedule.alpha(p.r) * rows0 + schedule.beta(p.r) * rows1;
    }
    if (x1.labeled()) out.labels = x1.labels;
    return out;
}

} // namespace driftflow
