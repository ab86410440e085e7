#pragma once

#include <cstddef>
#include <functional>

namespace peelkit::verify {

enum class Execution { serial, parallel };

/// Calls body(i) for i in [0, n). Bodies must write only to slot i of
/// preallocated outputs, so results do not depend on the schedule. The first
/// exception thrown by any body is rethrown after the loop.
void run_replicates(std::size_t n, const std::function<void(std::size_t)>& body,
                    Execution exec = Execution::parallel, int threads = 0);

/// Worker count the parallel runner would use.
int worker_count(int threads = 0);

}  // namespace peelkit::verify
