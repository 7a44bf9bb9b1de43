#include "driftflow/synthdata.hpp"

#include "driftflow/errors.hpp"
#include "driftflow/rng.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace driftflow {

namespace {

constexpr double kPi = std::numbers::pi;

// Letter M diagonals: each stroke runs from the inner edge of a vertical bar
// top down to the center valley at (0, -0.2), chopped into stacked bands.
constexpr int kDiagonalBands = 8;

std::vector<Rect> make_letter_m() {
    std::vector<Rect> strokes;
    strokes.push_back({-0.9, -0.6, -1.0, 1.0});
    strokes.push_back({0.6, 0.9, -1.0, 1.0});
    const double y_top = 1.0, y_bot = -0.2;
    const double band = (y_top - y_bot) / kDiagonalBands;
    for (int side = 0; side < 2; ++side) {
        const double x_start = side == 0 ? -0.75 : 0.75;
        for (int k = 0; k < kDiagonalBands; ++k) {
            const double frac = (k + 0.5) / kDiagonalBands;
            const double xc = x_start * (1.0 - frac);
            const double hi = y_top - k * band;
            strokes.push_back({xc - 0.15, xc + 0.15, hi - band, hi});
        }
    }
    return strokes;
}

int checker_cell(double u, double scale) {
    // Maps a coordinate in [-scale, scale] to its grid column in 0..3; the
    // upper boundary belongs to the last cell.
    int i = static_cast<int>(std::floor((u / scale + 1.0) * 2.0));
    if (i < 0) i = 0;
    if (i > 3) i = 3;
    return i;
}

// Index of a black checkerboard cell among all black cells, scanned rows
// bottom-up then columns left-to-right; -1 for white cells.
int black_cell_index(int i, int j) {
    if ((i + j) % 2 != 0) return -1;
    int idx = 0;
    for (int jj = 0; jj < 4; ++jj)
        for (int ii = 0; ii < 4; ++ii) {
            if ((ii + jj) % 2 != 0) continue;
            if (ii == i && jj == j) return idx;
            ++idx;
        }
    return -1;
}

struct BlackCell {
    int i, j, index;
};

std::vector<BlackCell> black_cells() {
    std::vector<BlackCell> cells;
    int idx = 0;
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i)
            if ((i + j) % 2 == 0) cells.push_back({i, j, idx++});
    return cells;
}

void add_noise(PointBatch& batch, double noise_std, Rng& rng) {
    if (noise_std <= 0.0) return;
    for (int i = 0; i < batch.n(); ++i)
        for (int j = 0; j < batch.dim(); ++j)
            batch.data(i, j) += noise_std * rng.normal();
}

// Draws one point from the area-weighted stroke mixture.
void sample_from_strokes(const std::vector<Rect>& strokes, double total_area,
                         Rng& rng, double& x, double& y) {
    double pick = rng.uniform() * total_area;
    size_t s = 0;
    for (; s + 1 < strokes.size(); ++s) {
        pick -= strokes[s].area();
        if (pick < 0.0) break;
    }
    const Rect& r = strokes[s];
    x = rng.uniform(r.x0, r.x1);
    y = rng.uniform(r.y0, r.y1);
}

void moons_point(int arc, double theta, double& x, double& y) {
    if (arc == 0) {
        x = std::cos(theta);
        y = std::sin(theta);
    } else {
        x = 1.0 - std::cos(theta);
        y = 0.5 - std::sin(theta);
    }
}

} // namespace

const char* dataset_name_str(DatasetName name) {
    switch (name) {
        case DatasetName::letter_f: return "letter_f";
        case DatasetName::letter_m: return "letter_m";
        case DatasetName::two_moons: return "two_moons";
        case DatasetName::checkerboard: return "checkerboard";
        case DatasetName::gaussian_iso: return "gaussian_iso";
    }
    return "?";
}

const char* source_kind_str(SourceKind kind) {
    return kind == SourceKind::circle_uniform ? "circle_uniform" : "gaussian_iso";
}

void DatasetSpec::validate() const {
    if (!(scale > 0.0)) throw argument_error("dataset scale must be positive");
    if (noise_std < 0.0) throw argument_error("noise_std must be nonnegative");
    if (class_count != 0 && class_count != 2 && class_count != 4 && class_count != 8)
        throw argument_error("class_count must be one of {0, 2, 4, 8}");
    const bool conditional = class_count > 0;
    switch (name) {
        case DatasetName::two_moons:
            if (conditional && class_count != 2)
                throw argument_error("two_moons supports class_count 0 or 2");
            break;
        case DatasetName::checkerboard:
            break;  // any of {0, 2, 4, 8}
        default:
            if (conditional)
                throw argument_error(std::string(dataset_name_str(name)) +
                                     " is unconditional only (class_count = 0)");
    }
}

void SourceSpec::validate() const {
    if (!(radius_or_std > 0.0)) throw argument_error("radius_or_std must be positive");
}

DatasetSpec default_dataset(DatasetName name) {
    DatasetSpec spec;
    spec.name = name;
    switch (name) {
        case DatasetName::two_moons: spec.noise_std = 0.05; break;
        case DatasetName::checkerboard: spec.scale = 2.0; break;
        default: break;
    }
    return spec;
}

std::vector<Rect> letter_strokes(DatasetName name) {
    if (name == DatasetName::letter_f)
        return {{-0.6, -0.3, -1.0, 1.0},    // vertical bar
                {-0.6, 0.6, 0.7, 1.0},      // top bar
                {-0.6, 0.35, -0.05, 0.25}}; // middle bar
    if (name == DatasetName::letter_m) {
        static const std::vector<Rect> m = make_letter_m();
        return m;
    }
    throw argument_error("letter_strokes: not a letter dataset");
}

PointBatch sample_source(const SourceSpec& spec, int n, std::uint64_t seed) {
    spec.validate();
    if (n < 1) throw argument_error("sample_source: n must be >= 1");
    Rng rng(derive_seed(seed, 0x50u));
    PointBatch batch;
    batch.data.resize(n, 2);
    if (spec.kind == SourceKind::circle_uniform) {
        for (int i = 0; i < n; ++i) {
            const double theta = rng.uniform() * 2.0 * kPi;
            batch.data(i, 0) = spec.radius_or_std * std::cos(theta);
            batch.data(i, 1) = spec.radius_or_std * std::sin(theta);
        }
    } else {
        for (int i = 0; i < n; ++i) {
            batch.data(i, 0) = spec.radius_or_std * rng.normal();
            batch.data(i, 1) = spec.radius_or_std * rng.normal();
        }
    }
    return batch;
}

namespace {

// Shared body for unconditional and class-restricted target sampling.
// class_id < 0 means unrestricted.
PointBatch sample_target_impl(const DatasetSpec& spec, int class_id, int n,
                              std::uint64_t seed) {
    spec.validate();
    if (n < 1) throw argument_error("sample_target: n must be >= 1");
    if (class_id >= 0) {
        if (spec.class_count <= 0)
            throw argument_error("class-restricted sampling needs class_count > 0");
        if (class_id >= spec.class_count)
            throw argument_error("class id out of range");
    }

    Rng rng(derive_seed(seed, 0x71u));
    PointBatch batch;
    batch.data.resize(n, 2);
    const bool want_labels = spec.class_count > 0;
    IntVector labels;
    if (want_labels) labels.resize(n);

    switch (spec.name) {
        case DatasetName::gaussian_iso: {
            for (int i = 0; i < n; ++i) {
                batch.data(i, 0) = spec.scale * rng.normal();
                batch.data(i, 1) = spec.scale * rng.normal();
            }
            break;
        }
        case DatasetName::two_moons: {
            for (int i = 0; i < n; ++i) {
                const int arc = class_id >= 0 ? class_id : (rng.uniform() < 0.5 ? 0 : 1);
                const double theta = rng.uniform() * kPi;
                double x, y;
                moons_point(arc, theta, x, y);
                batch.data(i, 0) = spec.scale * x;
                batch.data(i, 1) = spec.scale * y;
                if (want_labels) labels(i) = arc;
            }
            break;
        }
        case DatasetName::checkerboard: {
            const auto cells = black_cells();
            std::vector<BlackCell> pool;
            for (const auto& c : cells)
                if (class_id < 0 || c.index % spec.class_count == class_id)
                    pool.push_back(c);
            const double cell = spec.scale / 2.0;
            for (int i = 0; i < n; ++i) {
                const auto& c = pool[rng.uniform_index(pool.size())];
                const double x0 = -spec.scale + c.i * cell;
                const double y0 = -spec.scale + c.j * cell;
                batch.data(i, 0) = rng.uniform(x0, x0 + cell);
                batch.data(i, 1) = rng.uniform(y0, y0 + cell);
                if (want_labels) labels(i) = c.index % spec.class_count;
            }
            break;
        }
        case DatasetName::letter_f:
        case DatasetName::letter_m: {
            const auto strokes = letter_strokes(spec.name);
            double total = 0.0;
            for (const auto& s : strokes) total += s.area();
            for (int i = 0; i < n; ++i) {
                double x, y;
                sample_from_strokes(strokes, total, rng, x, y);
                batch.data(i, 0) = spec.scale * x;
                batch.data(i, 1) = spec.scale * y;
            }
            break;
        }
    }

    add_noise(batch, spec.noise_std, rng);
    if (want_labels) batch.labels = labels;
    return batch;
}

} // namespace

PointBatch sample_target(const DatasetSpec& spec, int n, std::uint64_t seed) {
    return sample_target_impl(spec, -1, n, seed);
}

PointBatch sample_target_class(const DatasetSpec& spec, int class_id, int n,
                               std::uint64_t seed) {
    return sample_target_impl(spec, class_id, n, seed);
}

bool in_support(const DatasetSpec& spec, double x, double y) {
    const double tol = 1e-9;
    const double ux = x / spec.scale, uy = y / spec.scale;
    switch (spec.name) {
        case DatasetName::gaussian_iso:
            return true;
        case DatasetName::two_moons: {
            const double upper = std::abs(std::hypot(ux, uy) - 1.0);
            const double lower = std::abs(std::hypot(ux - 1.0, uy - 0.5) - 1.0);
            return (upper <= tol && uy >= -tol) || (lower <= tol && uy <= 0.5 + tol);
        }
        case DatasetName::checkerboard: {
            if (std::abs(x) > spec.scale + tol || std::abs(y) > spec.scale + tol)
                return false;
            const int i = checker_cell(x, spec.scale);
            const int j = checker_cell(y, spec.scale);
            return (i + j) % 2 == 0;
        }
        case DatasetName::letter_f:
        case DatasetName::letter_m: {
            for (const auto& s : letter_strokes(spec.name))
                if (s.contains(ux, uy)) return true;
            return false;
        }
    }
    return false;
}

int derive_label(const DatasetSpec& spec, double x, double y) {
    if (spec.class_count <= 0) return -1;
    const double ux = x / spec.scale, uy = y / spec.scale;
    if (spec.name == DatasetName::two_moons) {
        const double tol = 1e-9;
        if (std::abs(std::hypot(ux, uy) - 1.0) <= tol && uy >= -tol) return 0;
        if (std::abs(std::hypot(ux - 1.0, uy - 0.5) - 1.0) <= tol && uy <= 0.5 + tol)
            return 1;
        return -1;
    }
    if (spec.name == DatasetName::checkerboard) {
        if (!in_support(spec, x, y)) return -1;
        const int idx = black_cell_index(checker_cell(x, spec.scale),
                                         checker_cell(y, spec.scale));
        return idx < 0 ? -1 : idx % spec.class_count;
    }
    return -1;
}

} // namespace driftflow
