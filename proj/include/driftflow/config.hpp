#pragma once

#include "driftflow/synthdata.hpp"
#include "driftflow/trainer.hpp"

#include <string>
#include <vector>

namespace driftflow {

// One run description: everything that affects the math lives in the JSON
// document so the byte hash pins the experiment. Paths, seeds for sampling,
// and output toggles stay on the command line.
struct RunConfig {
    TrainConfig train;
    SourceSpec source;
    DatasetSpec dataset = default_dataset(DatasetName::two_moons);
    std::vector<int> nfe{1, 20};
    std::string out_dir = "out";
    std::string config_hash;  // FNV-1a of the config bytes, hex; set by load

    void validate() const;
};

// 64-bit FNV-1a of the byte string, as 16 lowercase hex digits.
std::string fnv1a64_hex(const std::string& bytes);

// Parses a schema-version-1 config document. The version field is required;
// every other key is optional and falls back to its default. Unknown keys at
// any level are rejected by name.
RunConfig parse_run_config(const std::string& text);

// Reads and parses the file, recording the hash of its raw bytes.
RunConfig load_run_config(const std::string& path);

// The fully resolved document (defaults made explicit), stable key order.
std::string run_config_to_json(const RunConfig& config);

} // namespace driftflow
