#pragma once

#include "evicheck/simd/kernels.hpp"

namespace evicheck::simd::detail {

extern const KernelTable kScalarTable;

// Defined only when the AVX2 translation unit is part of the build.
const KernelTable* avx2_table_if_compiled();

}  // namespace evicheck::simd::detail
