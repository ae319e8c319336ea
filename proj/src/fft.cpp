#include "slowflow/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <tuple>

#ifdef __GLIBC__
#include <malloc.h>
#endif

#if defined(__SSE2__)
#include <pmmintrin.h>
#include <xmmintrin.h>
#endif

namespace slowflow::detail {

namespace {

#ifdef __GLIBC__
// Field buffers are multi-MB and turn over every operation; keeping them in
// the main arena instead of fresh mmap regions avoids refaulting pages.
const bool malloc_tuned = [] {
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  return true;
}();
#endif

const bool main_thread_ftz = [] {
  enable_ftz();
  return true;
}();

// One cached in-place plan + aligned buffer per (shape, sign). Execution
// copies through the buffer under a mutex so callers stay lock-free and
// plan selection never depends on caller pointers.
struct PlanSlot {
  fftw_plan plan = nullptr;
  fftw_complex* buf = nullptr;
  std::size_t count = 0;
};

using Key = std::tuple<int, int, int, int>;  // n1, n2, n3, sign

std::map<Key, PlanSlot>& plan_cache() {
  static std::map<Key, PlanSlot> cache;
  return cache;
}

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

PlanSlot& get_plan(int n1, int n2, int n3, int sign) {
  auto& cache = plan_cache();
  const Key key{n1, n2, n3, sign};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  PlanSlot slot;
  slot.count = std::size_t(n1) * n2 * n3;
  slot.buf = fftw_alloc_complex(slot.count);
  const int dir = sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD;
  if (n3 > 1)
    slot.plan =
        fftw_plan_dft_3d(n1, n2, n3, slot.buf, slot.buf, dir, FFTW_ESTIMATE);
  else
    slot.plan = fftw_plan_dft_2d(n1, n2, slot.buf, slot.buf, dir, FFTW_ESTIMATE);
  return cache.emplace(key, slot).first->second;
}

PlanSlot& get_axis3_plan(int n1, int n2, int n3, int sign) {
  // Batch of n1*n2 contiguous length-n3 rows (i3 fastest layout).
  auto& cache = plan_cache();
  const Key key{-n1, -n2, n3, sign};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  PlanSlot slot;
  slot.count = std::size_t(n1) * n2 * n3;
  slot.buf = fftw_alloc_complex(slot.count);
  const int dir = sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD;
  const int n[1] = {n3};
  slot.plan = fftw_plan_many_dft(1, n, n1 * n2, slot.buf, nullptr, 1, n3,
                                 slot.buf, nullptr, 1, n3, dir, FFTW_ESTIMATE);
  return cache.emplace(key, slot).first->second;
}

void run(PlanSlot& slot, const std::complex<double>* in,
         std::complex<double>* out) {
  // std::complex<double> is layout-compatible with fftw_complex
  std::memcpy(static_cast<void*>(slot.buf), static_cast<const void*>(in),
              slot.count * sizeof(fftw_complex));
  fftw_execute(slot.plan);
  std::memcpy(static_cast<void*>(out), static_cast<const void*>(slot.buf),
              slot.count * sizeof(fftw_complex));
}

}  // namespace

void enable_ftz() {
#if defined(__SSE2__)
  _MM_SET_FLUSH_ZERO_MODE(_MM_FLUSH_ZERO_ON);
  _MM_SET_DENORMALS_ZERO_MODE(_MM_DENORMALS_ZERO_ON);
#endif
}

void dft(const Grid& g, const std::complex<double>* in,
         std::complex<double>* out, int sign) {
  std::lock_guard<std::mutex> lock(plan_mutex());
  run(get_plan(g.n1(), g.n2(), g.n3(), sign), in, out);
}

void dft_axis3(const Grid& g, const std::complex<double>* in,
               std::complex<double>* out, int sign) {
  if (g.n3() == 1) {
    if (out != in)
      std::memcpy(out, in, g.size() * sizeof(std::complex<double>));
    return;
  }
  std::lock_guard<std::mutex> lock(plan_mutex());
  run(get_axis3_plan(g.n1(), g.n2(), g.n3(), sign), in, out);
}

}  // namespace slowflow::detail
