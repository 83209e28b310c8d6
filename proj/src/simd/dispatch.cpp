#include <cassert>
#include <cstdlib>
#include <string_view>

#include "kernels_internal.hpp"

namespace evicheck::simd {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& select_kernels() {
  if (const char* forced = std::getenv("EVICHECK_SIMD");
      forced != nullptr && std::string_view(forced) == "scalar") {
    return detail::kScalarTable;
  }
  if (const KernelTable* avx2 = avx2_kernels()) return *avx2;
  return detail::kScalarTable;
}

}  // namespace

const KernelTable& scalar_kernels() { return detail::kScalarTable; }

const KernelTable* avx2_kernels() {
  static const bool supported = cpu_has_avx2();
  return supported ? detail::avx2_table_if_compiled() : nullptr;
}

const KernelTable& active_kernels() {
  static const KernelTable& table = select_kernels();
  return table;
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active_kernels().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active_kernels().axpy(alpha, x.data(), y.data(), x.size());
}

void hadamard(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  assert(a.size() == b.size() && a.size() == out.size());
  active_kernels().hadamard(a.data(), b.data(), out.data(), a.size());
}

void gemv(ConstMatrixView w, std::span<const double> x, std::span<double> y) {
  assert(x.size() == w.cols && y.size() == w.rows);
  active_kernels().gemv(w.data, w.rows, w.cols, x.data(), y.data());
}

void gemv_t(ConstMatrixView w, std::span<const double> g, std::span<double> x) {
  assert(g.size() == w.rows && x.size() == w.cols);
  active_kernels().gemv_t(w.data, w.rows, w.cols, g.data(), x.data());
}

void ger(double alpha, std::span<const double> g, std::span<const double> x, MatrixView w) {
  assert(g.size() == w.rows && x.size() == w.cols);
  active_kernels().ger(alpha, g.data(), w.rows, x.data(), w.cols, w.data);
}

void threshold(std::span<const double> p, double t, std::span<std::uint8_t> out) {
  assert(p.size() == out.size());
  active_kernels().threshold(p.data(), p.size(), t, out.data());
}

}  // namespace evicheck::simd
