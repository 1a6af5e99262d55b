#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace qcd {

/// Number of chunks parallel_chunks() uses for (n, threads, align).
inline std::size_t chunk_count(std::size_t n, std::size_t threads, std::size_t align) {
  const std::size_t units = (n + align - 1) / align;
  return std::min(std::max<std::size_t>(threads, 1), std::max<std::size_t>(units, 1));
}

/// Splits [0, n) into chunk_count() contiguous chunks whose boundaries are
/// multiples of `align`, runs fn(chunk, begin, end) on each (one thread per
/// chunk), and rethrows the first exception. Chunk boundaries depend only on
/// (n, threads, align); empty chunks are skipped.
template <class Fn>
void parallel_chunks(std::size_t n, std::size_t threads, std::size_t align, Fn&& fn) {
  const std::size_t chunks = chunk_count(n, threads, align);
  if (chunks == 1) {
    fn(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  const std::size_t units = (n + align - 1) / align;
  const std::size_t per = (units + chunks - 1) / chunks;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(chunks);
  for (std::size_t t = 0; t < chunks; ++t) {
    const std::size_t begin = std::min(n, t * per * align);
    const std::size_t end = std::min(n, (t + 1) * per * align);
    if (begin >= end) continue;
    pool.emplace_back([&, t, begin, end] {
      try {
        fn(t, begin, end);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, std::size_t align, Fn&& fn) {
  parallel_chunks(n, threads, align,
                  [&](std::size_t, std::size_t begin, std::size_t end) { fn(begin, end); });
}

inline std::size_t default_thread_count() {
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace qcd
