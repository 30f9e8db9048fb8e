#pragma once

// Replica-level parallelism. Each index writes only its own slot, and callers
// reduce the returned vector in index order, so results never depend on the
// number of threads.

#include <cstddef>
#include <exception>
#include <mutex>
#include <vector>

namespace brint {

enum class Exec { serial, parallel };

void set_num_threads(int n);
int num_threads();

template <class F>
void for_each_index(std::size_t n, F&& f, Exec exec = Exec::parallel) {
  if (exec == Exec::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr err;
  std::mutex mu;
  const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < nn; ++i) {
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

template <class T, class F>
std::vector<T> map_indices(std::size_t n, F&& f, Exec exec = Exec::parallel) {
  std::vector<T> out(n);
  for_each_index(n, [&](std::size_t i) { out[i] = f(i); }, exec);
  return out;
}

}  // namespace brint
