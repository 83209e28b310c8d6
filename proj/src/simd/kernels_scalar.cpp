#include "kernels_internal.hpp"

namespace evicheck::simd::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void hadamard_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void gemv_scalar(const double* w, std::size_t rows, std::size_t cols, const double* x,
                 double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] += dot_scalar(w + r * cols, x, cols);
}

void gemv_t_scalar(const double* w, std::size_t rows, std::size_t cols, const double* g,
                   double* x) {
  for (std::size_t r = 0; r < rows; ++r) axpy_scalar(g[r], w + r * cols, x, cols);
}

void ger_scalar(double alpha, const double* g, std::size_t rows, const double* x,
                std::size_t cols, double* w) {
  for (std::size_t r = 0; r < rows; ++r) axpy_scalar(alpha * g[r], x, w + r * cols, cols);
}

void threshold_scalar(const double* p, std::size_t n, double t, std::uint8_t* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = p[i] >= t ? 1 : 0;
}

}  // namespace

const KernelTable kScalarTable{
    "scalar",   dot_scalar, axpy_scalar, hadamard_scalar, gemv_scalar, gemv_t_scalar,
    ger_scalar, threshold_scalar,
};

}  // namespace evicheck::simd::detail
