#pragma once

namespace driftflow {

// Full command-line surface: train, sample, eval, verify. Returns the
// process exit code: 0 ok, 1 config/argument errors, 2 divergence,
// 3 I/O or corrupt files, 4 verification failure.
int run_cli(int argc, const char* const* argv);

} // namespace driftflow
