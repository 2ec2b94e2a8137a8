#include "airloc/fourq/field.hpp"

namespace airloc::fourq {

namespace {

constexpr u128 kMask64 = ~static_cast<std::uint64_t>(0);

// Reduces hi * 2^128 + lo with hi < 2^126, using 2^127 = 1 (mod p).
Fp reduce_wide(u128 lo, u128 hi) {
  const u128 folded = (lo & kP) + (lo >> 127) + (hi << 1);
  return Fp::from_u128(folded);
}

}  // namespace

Fp operator+(Fp a, Fp b) { return Fp::from_u128(a.value() + b.value()); }

Fp operator-(Fp a, Fp b) { return Fp::from_u128(a.value() + (kP - b.value())); }

Fp operator-(Fp a) { return Fp::from_u128(kP - a.value()); }

Fp operator*(Fp x, Fp y) {
  const u128 a0 = x.value() & kMask64, a1 = x.value() >> 64;
  const u128 b0 = y.value() & kMask64, b1 = y.value() >> 64;
  const u128 low = a0 * b0;
  const u128 mid = a0 * b1 + a1 * b0;  // < 2^128 since a1, b1 < 2^63
  const u128 high = a1 * b1;
  const u128 lo = low + (mid << 64);
  const u128 carry = lo < low ? 1 : 0;
  const u128 hi = high + (mid >> 64) + carry;
  return reduce_wide(lo, hi);
}

Fp square(Fp a) { return a * a; }

Fp pow(Fp a, u128 e) {
  Fp result = Fp::from_u128(1);
  for (int bit = 127; bit >= 0; --bit) {
    result = square(result);
    if ((e >> bit) & 1) result = result * a;
  }
  return result;
}

Fp invert(Fp a) {
  if (a.is_zero()) throw FieldError("inversion of zero in GF(p)");
  return pow(a, kP - 2);
}

std::optional<Fp> sqrt(Fp a) {
  // p = 3 (mod 4): a^((p+1)/4) = a^(2^125).
  Fp r = a;
  for (int i = 0; i < 125; ++i) r = square(r);
  if (square(r) == a) return r;
  return std::nullopt;
}

Fp2 operator+(const Fp2& x, const Fp2& y) { return {x.a + y.a, x.b + y.b}; }
Fp2 operator-(const Fp2& x, const Fp2& y) { return {x.a - y.a, x.b - y.b}; }
Fp2 operator-(const Fp2& x) { return {-x.a, -x.b}; }

Fp2 operator*(const Fp2& x, const Fp2& y) {
  // Karatsuba: (a + bi)(c + di) = (ac - bd) + ((a + b)(c + d) - ac - bd) i
  const Fp ac = x.a * y.a;
  const Fp bd = x.b * y.b;
  const Fp cross = (x.a + x.b) * (y.a + y.b);
  return {ac - bd, cross - ac - bd};
}

Fp2 square(const Fp2& x) {
  // (a + b)(a - b) + 2ab i
  return {(x.a + x.b) * (x.a - x.b), (x.a + x.a) * x.b};
}

Fp2 invert(const Fp2& x) {
  if (x.is_zero()) throw FieldError("inversion of zero in GF(p^2)");
  const Fp norm_inv = invert(square(x.a) + square(x.b));
  return {x.a * norm_inv, -(x.b * norm_inv)};
}

std::optional<Fp2> sqrt(const Fp2& x) {
  if (x.b.is_zero()) {
    if (auto r = sqrt(x.a)) return Fp2{*r, Fp{}};
    // -1 is a non-residue mod p, so -a is a square and sqrt(a) = sqrt(-a) i.
    if (auto r = sqrt(-x.a)) return Fp2{Fp{}, *r};
    return std::nullopt;
  }
  const auto s = sqrt(square(x.a) + square(x.b));
  if (!s) return std::nullopt;
  const Fp half = invert(Fp::from_u128(2));
  std::optional<Fp> re = sqrt((x.a + *s) * half);
  if (!re) re = sqrt((x.a - *s) * half);
  if (!re || re->is_zero()) return std::nullopt;
  const Fp im = x.b * invert(*re + *re);
  const Fp2 root{*re, im};
  if (!(square(root) == x)) return std::nullopt;
  return root;
}

Fp2 select(const Fp2& on_false, const Fp2& on_true, std::uint64_t flag) {
  const u128 mask = static_cast<u128>(0) - static_cast<u128>(flag & 1);
  const auto pick = [mask](Fp f, Fp t) { return Fp::from_u128((f.value() & ~mask) | (t.value() & mask)); };
  return {pick(on_false.a, on_true.a), pick(on_false.b, on_true.b)};
}

void store(const Fp2& x, std::span<std::uint8_t, 32> out) {
  const u128 parts[2] = {x.a.value(), x.b.value()};
  for (int h = 0; h < 2; ++h) {
    for (int i = 0; i < 16; ++i) out[16 * h + i] = static_cast<std::uint8_t>(parts[h] >> (8 * i));
  }
}

Fp2 load(std::span<const std::uint8_t, 32> in) {
  u128 parts[2] = {0, 0};
  for (int h = 0; h < 2; ++h) {
    for (int i = 15; i >= 0; --i) parts[h] = (parts[h] << 8) | in[16 * h + i];
    if (parts[h] >= kP) throw FieldError("non-canonical GF(p) element");
  }
  return {Fp::from_u128(parts[0]), Fp::from_u128(parts[1])};
}

}  // namespace airloc::fourq
