#include "driftflow/common.hpp"

#include <cstdlib>
#include <string>

namespace driftflow {

int thread_budget() {
    static const int budget = [] {
        const char* env = std::getenv("DRIFTFLOW_THREADS");
        if (env == nullptr) return 1;
        try {
            const int n = std::stoi(env);
            return n < 1 ? 1 : n;
        } catch (...) {
            return 1;
        }
    }();
    return budget;
}

} // namespace driftflow
