#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>

namespace fsr {

/// Serial is the reference path; Parallel runs the same kernel under
/// OpenMP and must produce bit-identical results.
enum class ExecPolicy { Serial, Parallel };

/// Exceptions thrown by the body are captured and rethrown after the
/// loop; they must not escape an OpenMP region.
template <class Body>
void par_for(size_t n, ExecPolicy policy, const Body& body) {
#ifdef FSR_HAVE_OPENMP
  if (policy == ExecPolicy::Parallel) {
    std::exception_ptr err;
    std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic, 64)
    for (long i = 0; i < static_cast<long>(n); ++i) {
      if (failed.load(std::memory_order_relaxed)) continue;
      try {
        body(static_cast<size_t>(i));
      } catch (...) {
        bool claim = false;
        if (failed.compare_exchange_strong(claim, true))
          err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
    return;
  }
#else
  (void)policy;
#endif
  for (size_t i = 0; i < n; ++i) body(i);
}

/// Keeps the smallest offered value; used to pick the least-indexed
/// counterexample so parallel scans report the same witness as serial ones.
class AtomicMin {
 public:
  static constexpr uint64_t kNone = ~uint64_t{0};

  void offer(uint64_t v) {
    uint64_t cur = v_.load(std::memory_order_relaxed);
    while (v < cur &&
           !v_.compare_exchange_weak(cur, v, std::memory_order_relaxed)) {
    }
  }
  uint64_t get() const { return v_.load(std::memory_order_relaxed); }
  bool hit() const { return get() != kNone; }

 private:
  std::atomic<uint64_t> v_{kNone};
};

class AtomicCount {
 public:
  void add(uint64_t d) { v_.fetch_add(d, std::memory_order_relaxed); }
  uint64_t get() const { return v_.load(std::memory_order_relaxed); }

 private:
  std::atomic<uint64_t> v_{0};
};

}  // namespace fsr
