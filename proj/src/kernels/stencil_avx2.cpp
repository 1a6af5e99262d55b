#include <algorithm>
#include <cmath>
#include <limits>

#include "qcd/kernels.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define QCD_AVX2_KERNELS 1
#include <immintrin.h>
#endif

namespace qcd::kernels::avx2 {

#ifdef QCD_AVX2_KERNELS

bool compiled() { return true; }

__attribute__((target("avx2"))) void accumulate(const StencilView& stencil, std::size_t begin,
                                                std::size_t end, const double* values,
                                                const double* base, double* out) {
  std::size_t g = begin;
  // Peel to a lane boundary so the transposed loads are aligned groups.
  const std::size_t head_end = std::min(end, (begin + kLaneWidth - 1) / kLaneWidth * kLaneWidth);
  if (g < head_end) {
    scalar::accumulate(stencil, g, head_end, values, base, out);
    g = head_end;
  }
  for (; g + kLaneWidth <= end; g += kLaneWidth) {
    __m256d acc = _mm256_loadu_pd(base + g);
    for (std::size_t s = 0; s < stencil.width; ++s) {
      const std::size_t slot = s * stencil.stride + g;
      const __m256d w = _mm256_loadu_pd(stencil.weights + slot);
      const __m128i idx =
          _mm_loadu_si128(reinterpret_cast<const __m128i*>(stencil.indices + slot));
      const __m256d v = _mm256_i32gather_pd(values, idx, 8);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(w, v));
    }
    _mm256_storeu_pd(out + g, acc);
  }
  if (g < end) scalar::accumulate(stencil, g, end, values, base, out);
}

__attribute__((target("avx2"))) double relax(std::size_t begin, std::size_t end, const double* h,
                                             const double* cont, const double* prev, double* next) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  __m256d delta = _mm256_setzero_pd();
  __m256d bad = _mm256_setzero_pd();
  std::size_t g = begin;
  for (; g + kLaneWidth <= end; g += kLaneWidth) {
    // min_pd(a, b) is (a < b) ? a : b, matching the scalar select.
    const __m256d v = _mm256_min_pd(_mm256_loadu_pd(h + g), _mm256_loadu_pd(cont + g));
    _mm256_storeu_pd(next + g, v);
    bad = _mm256_or_pd(bad, _mm256_cmp_pd(_mm256_andnot_pd(sign_mask, v), inf, _CMP_NLT_UQ));
    const __m256d d = _mm256_andnot_pd(sign_mask, _mm256_sub_pd(v, _mm256_loadu_pd(prev + g)));
    delta = _mm256_max_pd(delta, d);
  }
  alignas(32) double lanes[kLaneWidth];
  _mm256_store_pd(lanes, delta);
  double result = 0.0;
  for (double lane : lanes) result = result > lane ? result : lane;
  if (g < end) {
    const double tail = scalar::relax(g, end, h, cont, prev, next);
    if (std::isnan(tail)) return tail;
    result = result > tail ? result : tail;
  }
  if (_mm256_movemask_pd(bad) != 0) return std::numeric_limits<double>::quiet_NaN();
  return result;
}

#else

bool compiled() { return false; }

void accumulate(const StencilView& stencil, std::size_t begin, std::size_t end, const double* values,
                const double* base, double* out) {
  scalar::accumulate(stencil, begin, end, values, base, out);
}

double relax(std::size_t begin, std::size_t end, const double* h, const double* cont,
             const double* prev, double* next) {
  return scalar::relax(begin, end, h, cont, prev, next);
}

#endif

}  // namespace qcd::kernels::avx2
