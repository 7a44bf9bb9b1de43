#pragma once

#include "driftflow/netcore.hpp"
#include "driftflow/synthdata.hpp"
#include "driftflow/trainer.hpp"

#include <optional>
#include <string>

namespace driftflow {

// Run context stored alongside the weights so sampling and evaluation can be
// driven from the checkpoint alone. The training method decides the default
// stepping rule at inference: flow_matching heads only ever saw equal time
// inputs, so they are integrated with velocity stepping.
struct CheckpointMeta {
    long step = 0;
    std::optional<Method> method;
    std::optional<SourceSpec> source;
    std::optional<DatasetSpec> dataset;
    std::string config_hash;  // empty = not recorded
};

// File layout: one JSON header line (arch widths, embedding, parameterization,
// step, plus the optional run context), then the flat parameter vector as
// little-endian 64-bit floats.
void save_checkpoint(const std::string& path, const TransportNet& net,
                     const CheckpointMeta& meta);

struct Checkpoint {
    TransportNet net;
    CheckpointMeta meta;
};

Checkpoint load_checkpoint(const std::string& path);

} // namespace driftflow
