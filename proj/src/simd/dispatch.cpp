#include <cstdlib>
#include <string>

#include "airloc/simd/kernels.hpp"

namespace airloc::simd {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "?";
}

std::vector<const KernelTable*> available_kernels() {
  std::vector<const KernelTable*> out{&scalar_kernels()};
  if (const KernelTable* t = avx2_kernels()) out.push_back(t);
  if (const KernelTable* t = neon_kernels()) out.push_back(t);
  return out;
}

namespace {

const KernelTable& select() {
  const auto tables = available_kernels();
  if (const char* forced = std::getenv("AIRLOC_SIMD")) {
    for (const KernelTable* t : tables) {
      if (to_string(t->isa) == forced) return *t;
    }
  }
  return *tables.back();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace airloc::simd
