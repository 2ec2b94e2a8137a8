#include "airloc/simd/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>

namespace airloc::simd {

namespace {

void xor_bytes_neon(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src) {
  const std::size_t n = dst.size();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    vst1q_u8(dst.data() + i, veorq_u8(vld1q_u8(dst.data() + i), vld1q_u8(src.data() + i)));
  }
  for (; i < n; ++i) dst[i] ^= src[i];
}

void scale_neon(std::span<const double> in, double factor, std::span<double> out) {
  const std::size_t n = in.size();
  const float64x2_t f = vdupq_n_f64(factor);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out.data() + i, vmulq_f64(vld1q_f64(in.data() + i), f));
  for (; i < n; ++i) out[i] = in[i] * factor;
}

void norm3_neon(std::span<const double> x, std::span<const double> y, std::span<const double> z,
                std::span<double> out) {
  const std::size_t n = out.size();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vx = vld1q_f64(x.data() + i);
    const float64x2_t vy = vld1q_f64(y.data() + i);
    const float64x2_t vz = vld1q_f64(z.data() + i);
    // vmulq + vaddq, never vfmaq: fused rounding would diverge from scalar.
    const float64x2_t s = vaddq_f64(vaddq_f64(vmulq_f64(vx, vx), vmulq_f64(vy, vy)), vmulq_f64(vz, vz));
    vst1q_f64(out.data() + i, vsqrtq_f64(s));
  }
  for (; i < n; ++i) {
    const double xx = x[i] * x[i];
    const double yy = y[i] * y[i];
    const double zz = z[i] * z[i];
    out[i] = std::sqrt((xx + yy) + zz);
  }
}

}  // namespace

const KernelTable* neon_kernels() {
  static const KernelTable table{Isa::kNeon, xor_bytes_neon, scale_neon, norm3_neon};
  return &table;
}

}  // namespace airloc::simd

#else

namespace airloc::simd {
const KernelTable* neon_kernels() { return nullptr; }
}  // namespace airloc::simd

#endif
