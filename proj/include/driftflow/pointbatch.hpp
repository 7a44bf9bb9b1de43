#pragma once

#include "driftflow/common.hpp"

#include <optional>
#include <string>

namespace driftflow {

// A batch of points, one row per sample, with optional integer class labels.
struct PointBatch {
    Matrix data;                      // n x d
    std::optional<IntVector> labels;  // size n when present

    int n() const { return static_cast<int>(data.rows()); }
    int dim() const { return static_cast<int>(data.cols()); }
    bool labeled() const { return labels.has_value(); }
};

// CSV with header "x0,x1[,label]". Coordinates are written with 17
// significant digits so a read-back round-trips the doubles exactly.
void write_csv(const PointBatch& batch, const std::string& path);
PointBatch read_csv(const std::string& path);

// Formats one double with enough digits to round-trip.
std::string format_double(double v);

} // namespace driftflow
