#pragma once

#include "driftflow/pointbatch.hpp"

#include <cstdint>
#include <vector>

namespace driftflow {

enum class DatasetName { letter_f, letter_m, two_moons, checkerboard, gaussian_iso };

// Target distribution description. scale is a coordinate half-extent,
// noise_std an additive Gaussian jitter, class_count = 0 means unlabeled.
struct DatasetSpec {
    DatasetName name = DatasetName::two_moons;
    double scale = 1.0;
    double noise_std = 0.0;
    int class_count = 0;

    // Throws argument_error on out-of-range fields or unsupported class
    // counts (moons carries at most 2 classes, checkerboard up to 8, the
    // letters and the isotropic Gaussian are unconditional only).
    void validate() const;
};

// Convention defaults per dataset: moons get the customary 0.05 jitter and
// the checkerboard spans [-2, 2]^2; everything else is scale 1, no noise.
DatasetSpec default_dataset(DatasetName name);

enum class SourceKind { circle_uniform, gaussian_iso };

struct SourceSpec {
    SourceKind kind = SourceKind::circle_uniform;
    double radius_or_std = 1.5;

    void validate() const;
};

PointBatch sample_source(const SourceSpec& spec, int n, std::uint64_t seed);
PointBatch sample_target(const DatasetSpec& spec, int n, std::uint64_t seed);

// Draws n points of a single class; used to build stratified batches for
// class-conditional training. Requires class_count > 0.
PointBatch sample_target_class(const DatasetSpec& spec, int class_id, int n,
                               std::uint64_t seed);

// Noise-free support membership. With noise_std = 0 every sample from
// sample_target satisfies this predicate.
bool in_support(const DatasetSpec& spec, double x, double y);

// Re-derives the class label of a zero-noise point; -1 when the spec is
// unconditional or the point is off-support.
int derive_label(const DatasetSpec& spec, double x, double y);

// Axis-aligned stroke rectangle, [x0, x1] x [y0, y1].
struct Rect {
    double x0, x1, y0, y1;
    double area() const { return (x1 - x0) * (y1 - y0); }
    bool contains(double x, double y) const {
        return x >= x0 && x <= x1 && y >= y0 && y <= y1;
    }
};

// The stroke lists that define the letter supports (unit scale).
std::vector<Rect> letter_strokes(DatasetName name);

const char* dataset_name_str(DatasetName name);
const char* source_kind_str(SourceKind kind);

} // namespace driftflow
