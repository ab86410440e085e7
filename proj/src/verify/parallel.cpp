#include "peelkit/verify/parallel.hpp"

#include <omp.h>

#include <exception>
#include <mutex>

namespace peelkit::verify {

void run_replicates(std::size_t n, const std::function<void(std::size_t)>& body, Execution exec, int threads) {
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  const long count = static_cast<long>(n);
  const int workers = worker_count(threads);
#pragma omp parallel for schedule(dynamic, 8) num_threads(workers)
  for (long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      const std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

int worker_count(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

}  // namespace peelkit::verify
