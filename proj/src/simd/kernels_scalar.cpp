#include <cmath>

#include "airloc/simd/kernels.hpp"

namespace airloc::simd {

namespace {

void xor_bytes_scalar(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= src[i];
}

void scale_scalar(std::span<const double> in, double factor, std::span<double> out) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] * factor;
}

void norm3_scalar(std::span<const double> x, std::span<const double> y, std::span<const double> z,
                  std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double xx = x[i] * x[i];
    const double yy = y[i] * y[i];
    const double zz = z[i] * z[i];
    out[i] = std::sqrt((xx + yy) + zz);
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::kScalar, xor_bytes_scalar, scale_scalar, norm3_scalar};
  return table;
}

}  // namespace airloc::simd
