#pragma once

#include <stdexcept>
#include <string>

namespace driftflow {

// Bad arguments or malformed configuration. CLI exit code 1.
struct argument_error : std::invalid_argument {
    explicit argument_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Non-finite values produced during training or inference. CLI exit code 2.
struct divergence_error : std::runtime_error {
    explicit divergence_error(const std::string& msg, long step = -1)
        : std::runtime_error(msg), step(step) {}
    long step;
};

// Unreadable, unwritable or corrupt files. CLI exit code 3.
struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Metric preconditions violated (label mismatches, missing classes, ...).
struct metric_error : std::runtime_error {
    explicit metric_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace driftflow
