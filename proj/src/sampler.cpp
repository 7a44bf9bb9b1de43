#include "driftflow/sampler.hpp"

#include "driftflow/errors.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>

namespace driftflow {

TimeGrid TimeGrid::uniform(int steps) {
    if (steps < 1) throw argument_error("TimeGrid::uniform: steps must be >= 1");
    TimeGrid grid;
    grid.points.resize(static_cast<size_t>(steps) + 1);
    for (int m = 0; m <= steps; ++m)
        grid.points[static_cast<size_t>(m)] =
            static_cast<double>(m) / static_cast<double>(steps);
    return grid;
}

void TimeGrid::validate() const {
    if (points.size() < 2) throw argument_error("time grid needs at least 2 points");
    if (points.front() != 0.0 || points.back() != 1.0)
        throw argument_error("time grid must start at 0 and end at 1");
    for (size_t m = 0; m + 1 < points.size(); ++m)
        if (!(points[m] < points[m + 1]))
            throw argument_error("time grid must ascend strictly");
}

GenerateResult generate(const TransportNet& net, const PointBatch& source,
                        const TimeGrid& grid, bool record_trajectory,
                        Stepping stepping) {
    grid.validate();
    if (net.class_count > 0 && !source.labeled())
        throw argument_error("generate: conditional net needs a labeled source batch");
    if (stepping == Stepping::velocity &&
        net.parameterization == Parameterization::direct_state)
        throw argument_error(
            "generate: velocity stepping needs a velocity head, not direct_state");

    GenerateResult res;
    const IntVector* labels = source.labeled() ? &*source.labels : nullptr;
    Matrix x = source.data;
    if (record_trajectory) res.trajectory.push_back(x);

    for (int m = 0; m < grid.intervals(); ++m) {
        const double t = grid.points[static_cast<size_t>(m)];
        const double r = grid.points[static_cast<size_t>(m) + 1];
        try {
            if (stepping == Stepping::velocity)
                x += (r - t) * forward(net, x, t, t, labels);
            else
                x = transport(net, x, t, r, labels);
        } catch (const divergence_error& e) {
            throw divergence_error(std::string(e.what()) + " (inference step " +
                                       std::to_string(m) + ")",
                                   m);
        }
        if (!x.allFinite())
            throw divergence_error("generate: non-finite state", m);
        if (record_trajectory) res.trajectory.push_back(x);
    }

    res.output.data = std::move(x);
    res.output.labels = source.labels;
    return res;
}

std::string write_trajectory(const std::string& out_dir, const TimeGrid& grid,
                             const GenerateResult& result) {
    if (result.trajectory.empty())
        throw argument_error("write_trajectory: no recorded states");
    if (result.trajectory.size() != grid.points.size())
        throw argument_error("write_trajectory: state count does not match grid");
    std::filesystem::create_directories(out_dir);

    nlohmann::json manifest;
    manifest["grid"] = grid.points;
    std::vector<std::string> files;
    for (size_t m = 0; m < result.trajectory.size(); ++m) {
        char name[32];
        std::snprintf(name, sizeof(name), "state_%03zu.csv", m);
        PointBatch state;
        state.data = result.trajectory[m];
        state.labels = result.output.labels;
        write_csv(state, out_dir + "/" + name);
        files.emplace_back(name);
    }
    manifest["files"] = files;

    const std::string manifest_path = out_dir + "/trajectory.json";
    std::ofstream out(manifest_path);
    if (!out) throw io_error("cannot open for writing: " + manifest_path);
    out << manifest.dump(2) << "\n";
    return manifest_path;
}

} // namespace driftflow
