#pragma once
// Dense double-precision kernels used by the encoder's forward and backward
// passes. Every kernel has a scalar reference implementation; an AVX2+FMA
// variant is selected at runtime when the CPU supports it. Setting the
// environment variable EVICHECK_SIMD=scalar forces the reference path.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace evicheck::simd {

// Row-major matrix view: element (r, c) lives at data[r * cols + c].
struct MatrixView {
  double* data;
  std::size_t rows;
  std::size_t cols;
};

struct ConstMatrixView {
  const double* data;
  std::size_t rows;
  std::size_t cols;

  ConstMatrixView(const double* d, std::size_t r, std::size_t c) : data(d), rows(r), cols(c) {}
  ConstMatrixView(MatrixView m) : data(m.data), rows(m.rows), cols(m.cols) {}  // NOLINT
};

struct KernelTable {
  std::string_view name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out = a * b (elementwise)
  void (*hadamard)(const double* a, const double* b, double* out, std::size_t n);
  // y += W x
  void (*gemv)(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y);
  // x += W^T g
  void (*gemv_t)(const double* w, std::size_t rows, std::size_t cols, const double* g, double* x);
  // W += alpha * g x^T
  void (*ger)(double alpha, const double* g, std::size_t rows, const double* x, std::size_t cols,
              double* w);
  // out[i] = p[i] >= threshold
  void (*threshold)(const double* p, std::size_t n, double threshold, std::uint8_t* out);
};

const KernelTable& scalar_kernels();

// nullptr when the build or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

// Chosen once per process.
const KernelTable& active_kernels();

// Span-based wrappers over active_kernels(). Sizes are checked with assert().
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void hadamard(std::span<const double> a, std::span<const double> b, std::span<double> out);
void gemv(ConstMatrixView w, std::span<const double> x, std::span<double> y);
void gemv_t(ConstMatrixView w, std::span<const double> g, std::span<double> x);
void ger(double alpha, std::span<const double> g, std::span<const double> x, MatrixView w);
void threshold(std::span<const double> p, double t, std::span<std::uint8_t> out);

}  // namespace evicheck::simd
