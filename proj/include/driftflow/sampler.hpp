#pragma once

#include "driftflow/netcore.hpp"
#include "driftflow/pointbatch.hpp"

#include <string>
#include <vector>

namespace driftflow {

// Inference time grid 0 = t_0 < t_1 < ... < t_N = 1.
struct TimeGrid {
    std::vector<double> points;

    static TimeGrid uniform(int steps);  // steps = N = number of intervals
    int intervals() const { return static_cast<int>(points.size()) - 1; }
    void validate() const;
};

struct GenerateResult {
    PointBatch output;
    std::vector<Matrix> trajectory;  // N+1 states when recorded, else empty
};

// How an inference step reads the network. two_time applies the transport
// map x <- x + (t_{m+1} - t_m) * u(x, t_m, t_{m+1}) (or the predicted state
// for direct_state nets). velocity is the Euler rule for nets trained with
// both time inputs equal: x <- x + (t_{m+1} - t_m) * u(x, t_m, t_m), so the
// head never sees a time gap it was not trained on.
enum class Stepping { two_time, velocity };

// Walks the grid with one network evaluation per interval. Labels on the
// source batch ride along and feed conditional nets.
GenerateResult generate(const TransportNet& net, const PointBatch& source,
                        const TimeGrid& grid, bool record_trajectory = false,
                        Stepping stepping = Stepping::two_time);

// One CSV per recorded state plus a manifest JSON listing the grid times and
// file names. Returns the manifest path.
std::string write_trajectory(const std::string& out_dir, const TimeGrid& grid,
                             const GenerateResult& result);

} // namespace driftflow
