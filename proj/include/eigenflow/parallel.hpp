#pragma once

#include <cstddef>
#include <functional>

namespace eigenflow {

/// Number of worker threads used by parallel_for. Defaults to the hardware
/// concurrency; the EIGENFLOW_WORKERS environment variable overrides it.
int worker_count();

/// Index-parallel map over [0, n). The body must write only to slots it owns
/// (results indexed by i), which keeps output independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace eigenflow
