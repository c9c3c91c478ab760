#pragma once

#include <Eigen/Core>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace uqrpca {

/// Process-wide worker count for data-parallel loops. 0 selects the hardware
/// concurrency; 1 forces serial execution.
void set_thread_count(int n);
int thread_count();

/// Run fn(i) for i in [0, n). Tasks must be independent; outputs written to
/// disjoint locations make the result schedule-independent.
void parallel_for(Eigen::Index n, const std::function<void(Eigen::Index)>& fn);

}  // namespace uqrpca
