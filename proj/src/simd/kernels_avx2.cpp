// Compiled with -mavx2 -mfma. Nothing in here may run before the dispatcher
// has confirmed CPU support.
#include "kernels_internal.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace evicheck::simd::detail {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void hadamard_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void gemv_avx2(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] += dot_avx2(w + r * cols, x, cols);
}

void gemv_t_avx2(const double* w, std::size_t rows, std::size_t cols, const double* g,
                 double* x) {
  for (std::size_t r = 0; r < rows; ++r) axpy_avx2(g[r], w + r * cols, x, cols);
}

void ger_avx2(double alpha, const double* g, std::size_t rows, const double* x, std::size_t cols,
              double* w) {
  for (std::size_t r = 0; r < rows; ++r) axpy_avx2(alpha * g[r], x, w + r * cols, cols);
}

void threshold_avx2(const double* p, std::size_t n, double t, std::uint8_t* out) {
  const __m256d vt = _mm256_set1_pd(t);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ge = _mm256_cmp_pd(_mm256_loadu_pd(p + i), vt, _CMP_GE_OQ);
    const int bits = _mm256_movemask_pd(ge);
    out[i] = bits & 1;
    out[i + 1] = (bits >> 1) & 1;
    out[i + 2] = (bits >> 2) & 1;
    out[i + 3] = (bits >> 3) & 1;
  }
  for (; i < n; ++i) out[i] = p[i] >= t ? 1 : 0;
}

const KernelTable kAvx2Table{
    "avx2",   dot_avx2, axpy_avx2, hadamard_avx2, gemv_avx2, gemv_t_avx2,
    ger_avx2, threshold_avx2,
};

}  // namespace

const KernelTable* avx2_table_if_compiled() { return &kAvx2Table; }

}  // namespace evicheck::simd::detail

#else

namespace evicheck::simd::detail {
const KernelTable* avx2_table_if_compiled() { return nullptr; }
}  // namespace evicheck::simd::detail

#endif
