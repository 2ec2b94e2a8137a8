// Built with -mavx2 only (no -mfma): products and sums round exactly like the
// scalar reference.

#include "airloc/simd/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__)

#include <immintrin.h>

#include <cmath>
#include <cstring>

namespace airloc::simd {

namespace {

void xor_bytes_avx2(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src) {
  const std::size_t n = dst.size();
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst.data() + i));
    const __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src.data() + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst.data() + i), _mm256_xor_si256(a, b));
  }
  for (; i < n; ++i) dst[i] ^= src[i];
}

void scale_avx2(std::span<const double> in, double factor, std::span<double> out) {
  const std::size_t n = in.size();
  const __m256d f = _mm256_set1_pd(factor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out.data() + i, _mm256_mul_pd(_mm256_loadu_pd(in.data() + i), f));
  }
  for (; i < n; ++i) out[i] = in[i] * factor;
}

void norm3_avx2(std::span<const double> x, std::span<const double> y, std::span<const double> z,
                std::span<double> out) {
  const std::size_t n = out.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x.data() + i);
    const __m256d vy = _mm256_loadu_pd(y.data() + i);
    const __m256d vz = _mm256_loadu_pd(z.data() + i);
    const __m256d xx = _mm256_mul_pd(vx, vx);
    const __m256d yy = _mm256_mul_pd(vy, vy);
    const __m256d zz = _mm256_mul_pd(vz, vz);
    _mm256_storeu_pd(out.data() + i, _mm256_sqrt_pd(_mm256_add_pd(_mm256_add_pd(xx, yy), zz)));
  }
  for (; i < n; ++i) {
    const double xx = x[i] * x[i];
    const double yy = y[i] * y[i];
    const double zz = z[i] * z[i];
    out[i] = std::sqrt((xx + yy) + zz);
  }
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{Isa::kAvx2, xor_bytes_avx2, scale_avx2, norm3_avx2};
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") ? &table : nullptr;
}

}  // namespace airloc::simd

#else

namespace airloc::simd {
const KernelTable* avx2_kernels() { return nullptr; }
}  // namespace airloc::simd

#endif
