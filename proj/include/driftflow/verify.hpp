#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace driftflow {

struct VerifyOptions {
    std::uint64_t seed = 0;
    int instances = 0;      // 0 = suite default
    long train_steps = 0;   // 0 = suite default; infinitesimal_limit only
};

struct SuiteResult {
    std::string suite;
    int instances = 0;
    int failures = 0;
    double worst_margin = 0.0;
    std::string margin_desc;  // what worst_margin measures
    std::uint64_t first_fail_seed = 0;
    std::string detail;       // one human-readable summary line

    bool passed() const { return failures == 0; }
};

// The suites cmd_verify exposes.
const std::vector<std::string>& verify_suite_names();

// Runs one property suite by name. Unknown name throws argument_error.
//   drift_equilibrium    pos = neg grouped instances leave zero drift
//   gradient_fd          reverse-mode grads vs central finite differences
//   w2_bounds            interval transport bound on random endpoint clouds
//   action_bound         grid action sum vs mean squared displacement
//   infinitesimal_limit  trained two-time net approaches the analytic
//                        velocity as the queried gap shrinks
//   sinkhorn             marginal convergence and the one-pass softmax identity
SuiteResult run_verify_suite(const std::string& name, const VerifyOptions& opts = {});

// Particle-space identity behind the stop-gradient target: with the target
// frozen, the gradient of the summed group loss with respect to a particle is
// exactly minus its drift vector. Used by the acceptance harness; not a CLI
// suite.
SuiteResult run_stop_gradient_suite(const VerifyOptions& opts = {});

} // namespace driftflow
