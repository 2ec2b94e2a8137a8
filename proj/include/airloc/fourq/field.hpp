#pragma once

// Arithmetic in GF(p), p = 2^127 - 1, and GF(p^2) = GF(p)[i] / (i^2 + 1).

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>

namespace airloc::fourq {

using u128 = unsigned __int128;

inline constexpr u128 kP = (static_cast<u128>(1) << 127) - 1;

class FieldError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Canonical representative in [0, p).
class Fp {
 public:
  constexpr Fp() = default;
  // Reduces any 128-bit value.
  static constexpr Fp from_u128(u128 v) {
    v = (v & kP) + (v >> 127);
    if (v >= kP) v -= kP;
    return Fp(v);
  }
  static constexpr Fp from_limbs(std::uint64_t lo, std::uint64_t hi) {
    return from_u128((static_cast<u128>(hi) << 64) | lo);
  }

  constexpr u128 value() const { return v_; }
  constexpr std::uint64_t lo() const { return static_cast<std::uint64_t>(v_); }
  constexpr std::uint64_t hi() const { return static_cast<std::uint64_t>(v_ >> 64); }
  constexpr bool is_zero() const { return v_ == 0; }

  friend constexpr bool operator==(Fp a, Fp b) { return a.v_ == b.v_; }

 private:
  constexpr explicit Fp(u128 v) : v_(v) {}
  u128 v_ = 0;
};

Fp operator+(Fp a, Fp b);
Fp operator-(Fp a, Fp b);
Fp operator-(Fp a);
Fp operator*(Fp a, Fp b);
Fp square(Fp a);
Fp pow(Fp a, u128 e);
// Throws FieldError on zero.
Fp invert(Fp a);
// nullopt when a is not a square.
std::optional<Fp> sqrt(Fp a);

// a + b i
struct Fp2 {
  Fp a;
  Fp b;

  static constexpr Fp2 zero() { return {}; }
  static constexpr Fp2 one() { return {Fp::from_u128(1), Fp{}}; }
  static constexpr Fp2 i() { return {Fp{}, Fp::from_u128(1)}; }

  constexpr bool is_zero() const { return a.is_zero() && b.is_zero(); }
  friend constexpr bool operator==(const Fp2& x, const Fp2& y) { return x.a == y.a && x.b == y.b; }
};

Fp2 operator+(const Fp2& x, const Fp2& y);
Fp2 operator-(const Fp2& x, const Fp2& y);
Fp2 operator-(const Fp2& x);
Fp2 operator*(const Fp2& x, const Fp2& y);
Fp2 square(const Fp2& x);
Fp2 invert(const Fp2& x);
std::optional<Fp2> sqrt(const Fp2& x);

// Constant-pattern select: returns `on_true` when flag is 1, `on_false` when 0.
Fp2 select(const Fp2& on_false, const Fp2& on_true, std::uint64_t flag);

// 32 octets: a then b, each 16 octets little-endian.
void store(const Fp2& x, std::span<std::uint8_t, 32> out);
// Throws FieldError if either half is >= p.
Fp2 load(std::span<const std::uint8_t, 32> in);

}  // namespace airloc::fourq
