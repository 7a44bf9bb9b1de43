#pragma once

#include "driftflow/common.hpp"

#include <string>

namespace driftflow {

// Standalone scatter plot of the two point sets, source in blue under
// generated in red, with a framed data box and corner coordinate labels.
// Output is deterministic for identical inputs.
void write_scatter_svg(const std::string& path, const Matrix& source,
                       const Matrix& generated, const std::string& title = "");

} // namespace driftflow
