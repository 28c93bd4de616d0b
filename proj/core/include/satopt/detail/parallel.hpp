#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

namespace satopt {

template <class T, class Fn>
std::vector<T> parallel_map(int n, int jobs, Fn&& fn) {
  std::vector<std::optional<T>> slots(static_cast<std::size_t>(std::max(n, 0)));
  std::vector<std::exception_ptr> errors(slots.size());
  std::atomic<int> next{0};

  auto worker = [&] {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const int workers = std::clamp(jobs, 1, std::max(n, 1));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<T> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace satopt
