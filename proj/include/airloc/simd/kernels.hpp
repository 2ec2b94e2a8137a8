#pragma once

// Data-parallel inner loops with a scalar reference and vectorized variants.
// Every variant must be bitwise identical to the scalar reference; the active
// variant is picked once at first use from the CPU features, and can be
// forced with AIRLOC_SIMD=scalar|avx2|neon (unknown or unsupported values
// fall back to the best available).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace airloc::simd {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view to_string(Isa isa);

struct KernelTable {
  Isa isa;
  // dst[i] ^= src[i], i < dst.size(); src.size() >= dst.size().
  void (*xor_bytes)(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src);
  // out[i] = in[i] * factor.
  void (*scale)(std::span<const double> in, double factor, std::span<double> out);
  // out[i] = sqrt(x[i]^2 + y[i]^2 + z[i]^2), evaluated as ((x*x + y*y) + z*z).
  void (*norm3)(std::span<const double> x, std::span<const double> y, std::span<const double> z,
                std::span<double> out);
};

const KernelTable& scalar_kernels();
// nullptr when the variant is not compiled in or the CPU lacks it.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

// All variants usable on this machine, scalar first.
std::vector<const KernelTable*> available_kernels();

// The dispatched table.
const KernelTable& active();

inline void xor_bytes(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src) {
  active().xor_bytes(dst, src);
}
inline void scale(std::span<const double> in, double factor, std::span<double> out) {
  active().scale(in, factor, out);
}
inline void norm3(std::span<const double> x, std::span<const double> y, std::span<const double> z,
                  std::span<double> out) {
  active().norm3(x, y, z, out);
}

}  // namespace airloc::simd
