#pragma once

// FourQ: the twisted Edwards curve -x^2 + y^2 = 1 + d x^2 y^2 over GF(p^2),
// p = 2^127 - 1, with #E = 392 * N for a 246-bit prime N.
//
// Scalar multiplication is a plain fixed-length double-and-add over
// extended coordinates.  It runs the same operation sequence for every
// scalar but is not hardened against side channels.

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>

#include "airloc/fourq/field.hpp"

namespace airloc::fourq {

class CurveError : public std::invalid_argument {
 public:
  enum class Kind { kWrongLength, kNonCanonical, kOffCurve, kSmallSubgroup, kNeutralResult, kZeroKey, kEntropy };

  CurveError(Kind kind, const char* what) : std::invalid_argument(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Little-endian 64-bit limbs.
struct UInt256 {
  std::array<std::uint64_t, 4> limb{};

  bool bit(unsigned i) const { return (limb[i / 64] >> (i % 64)) & 1; }
  bool is_zero() const { return (limb[0] | limb[1] | limb[2] | limb[3]) == 0; }
  static UInt256 from_u64(std::uint64_t v) { return {{v, 0, 0, 0}}; }
  friend bool operator==(const UInt256&, const UInt256&) = default;
};

// 32 octets little-endian.
UInt256 load_u256(std::span<const std::uint8_t, 32> in);
void store_u256(const UInt256& v, std::span<std::uint8_t, 32> out);

// Published FourQ parameters (FourQlib, FourQ_params.h).
namespace params {
// d = 0x0000000000000000000000E40000000000000142
//   + 0x5E472F846657E0FCB3821488F1FC0C8D i
inline constexpr Fp2 kD{Fp::from_limbs(0x0000000000000142, 0x00000000000000E4),
                        Fp::from_limbs(0xB3821488F1FC0C8D, 0x5E472F846657E0FC)};
inline constexpr Fp2 kGx{Fp::from_limbs(0x286592AD7B3833AA, 0x1A3472237C2FB305),
                         Fp::from_limbs(0x96869FB360AC77F6, 0x1E1F553F2878AA9C)};
inline constexpr Fp2 kGy{Fp::from_limbs(0xB924A2462BCBB287, 0x0E3FEE9BA120785A),
                         Fp::from_limbs(0x49A7C344844C8B5C, 0x6E1C4AF8630E0242)};
// Prime order of the generator.
inline constexpr UInt256 kOrder{{0x2FB2540EC7768CE7, 0xDFBD004DFE0F7999, 0xF05397829CBC14E5, 0x0029CBC14E5E0A72}};
inline constexpr std::uint64_t kCofactor = 392;
}  // namespace params

// Integer modulo N, canonical in [0, N).
class Scalar {
 public:
  Scalar() = default;
  // Reduces any 256-bit value mod N.
  static Scalar reduce(const UInt256& v);
  static Scalar from_u64(std::uint64_t v) { return reduce(UInt256::from_u64(v)); }
  static Scalar from_bytes(std::span<const std::uint8_t, 32> in) { return reduce(load_u256(in)); }

  const UInt256& value() const { return v_; }
  bool is_zero() const { return v_.is_zero(); }
  std::array<std::uint8_t, 32> to_bytes() const;
  // Overwrites the value with zeros.
  void wipe();

  friend bool operator==(const Scalar&, const Scalar&) = default;

 private:
  explicit Scalar(const UInt256& v) : v_(v) {}
  UInt256 v_;
};

// Extended twisted Edwards coordinates: x = X/Z, y = Y/Z, T = XY/Z.
struct ExtendedPoint {
  Fp2 X, Y, Z, T;
};

ExtendedPoint extended_neutral();
ExtendedPoint extended_add(const ExtendedPoint& p, const ExtendedPoint& q);
ExtendedPoint extended_double(const ExtendedPoint& p);
bool extended_equal(const ExtendedPoint& p, const ExtendedPoint& q);

bool is_on_curve(const Fp2& x, const Fp2& y);

// Affine point, validated on construction.
class CurvePoint {
 public:
  // The neutral element (0, 1).
  CurvePoint() : x_(Fp2::zero()), y_(Fp2::one()) {}
  static CurvePoint neutral() { return {}; }
  static CurvePoint generator();
  // Throws CurveError(kOffCurve).
  static CurvePoint from_affine(const Fp2& x, const Fp2& y);
  // Normalizes; the input is trusted to lie on the curve.
  static CurvePoint from_extended(const ExtendedPoint& p);

  const Fp2& x() const { return x_; }
  const Fp2& y() const { return y_; }
  bool is_neutral() const { return x_.is_zero() && y_ == Fp2::one(); }
  ExtendedPoint to_extended() const;
  CurvePoint negate() const { return {-x_, y_}; }

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;

 private:
  CurvePoint(const Fp2& x, const Fp2& y) : x_(x), y_(y) {}
  Fp2 x_, y_;
};

CurvePoint point_add(const CurvePoint& p, const CurvePoint& q);
CurvePoint point_double(const CurvePoint& p);
// k * P for a scalar mod N.
CurvePoint scalar_mul(const Scalar& k, const CurvePoint& p);
// k * P for any 256-bit integer (no reduction), e.g. N or 392 * N.
CurvePoint multiply_integer(const UInt256& k, const CurvePoint& p);
// 392 * P.
CurvePoint clear_cofactor(const CurvePoint& p);

inline constexpr std::size_t kEncodedPointSize = 64;
using EncodedPoint = std::array<std::uint8_t, kEncodedPointSize>;

// x then y, each Fp2 as two 16-octet little-endian halves.
EncodedPoint point_encode(const CurvePoint& p);
// Throws CurveError: kWrongLength, kNonCanonical (a half >= p) or kOffCurve.
CurvePoint point_decode(std::span<const std::uint8_t> bytes);

}  // namespace airloc::fourq
