#include "airloc/fourq/curve.hpp"

#include <openssl/crypto.h>

namespace airloc::fourq {

namespace {

using u64 = std::uint64_t;

// a >= b
bool geq(const UInt256& a, const UInt256& b) {
  for (int i = 3; i >= 0; --i) {
    if (a.limb[i] != b.limb[i]) return a.limb[i] > b.limb[i];
  }
  return true;
}

UInt256 sub(const UInt256& a, const UInt256& b) {
  UInt256 r;
  u64 borrow = 0;
  for (int i = 0; i < 4; ++i) {
    const u128 d = static_cast<u128>(a.limb[i]) - b.limb[i] - borrow;
    r.limb[i] = static_cast<u64>(d);
    borrow = static_cast<u64>(d >> 64) & 1;
  }
  return r;
}

UInt256 shl(const UInt256& a, unsigned s) {
  UInt256 r;
  const unsigned words = s / 64, bits = s % 64;
  for (int i = 3; i >= 0; --i) {
    const int src = i - static_cast<int>(words);
    if (src < 0) continue;
    u64 v = a.limb[src] << bits;
    if (bits != 0 && src > 0) v |= a.limb[src - 1] >> (64 - bits);
    r.limb[i] = v;
  }
  return r;
}

const Fp2& two_d() {
  static const Fp2 k = params::kD + params::kD;
  return k;
}

ExtendedPoint select(const ExtendedPoint& on_false, const ExtendedPoint& on_true, u64 flag) {
  return {fourq::select(on_false.X, on_true.X, flag), fourq::select(on_false.Y, on_true.Y, flag),
          fourq::select(on_false.Z, on_true.Z, flag), fourq::select(on_false.T, on_true.T, flag)};
}

}  // namespace

UInt256 load_u256(std::span<const std::uint8_t, 32> in) {
  UInt256 v;
  for (int i = 31; i >= 0; --i) v.limb[i / 8] = (v.limb[i / 8] << 8) | in[i];
  return v;
}

void store_u256(const UInt256& v, std::span<std::uint8_t, 32> out) {
  for (int i = 0; i < 32; ++i) out[i] = static_cast<std::uint8_t>(v.limb[i / 8] >> (8 * (i % 8)));
}

Scalar Scalar::reduce(const UInt256& v) {
  // N < 2^246, so at most 10 conditional subtractions of shifted N.
  UInt256 r = v;
  for (int s = 10; s >= 0; --s) {
    const UInt256 m = shl(params::kOrder, static_cast<unsigned>(s));
    if (geq(r, m)) r = sub(r, m);
  }
  return Scalar(r);
}

std::array<std::uint8_t, 32> Scalar::to_bytes() const {
  std::array<std::uint8_t, 32> out{};
  store_u256(v_, out);
  return out;
}

void Scalar::wipe() { OPENSSL_cleanse(v_.limb.data(), sizeof v_.limb); }

ExtendedPoint extended_neutral() { return {Fp2::zero(), Fp2::one(), Fp2::one(), Fp2::zero()}; }

ExtendedPoint extended_add(const ExtendedPoint& p, const ExtendedPoint& q) {
  // Hisil-Wong-Carter-Dawson unified addition for a = -1.
  const Fp2 a = (p.Y - p.X) * (q.Y - q.X);
  const Fp2 b = (p.Y + p.X) * (q.Y + q.X);
  const Fp2 c = p.T * two_d() * q.T;
  const Fp2 zz = p.Z * q.Z;
  const Fp2 d = zz + zz;
  const Fp2 e = b - a;
  const Fp2 f = d - c;
  const Fp2 g = d + c;
  const Fp2 h = b + a;
  return {e * f, g * h, f * g, e * h};
}

ExtendedPoint extended_double(const ExtendedPoint& p) {
  const Fp2 a = square(p.X);
  const Fp2 b = square(p.Y);
  const Fp2 zz = square(p.Z);
  const Fp2 c = zz + zz;
  const Fp2 d = -a;
  const Fp2 e = square(p.X + p.Y) - a - b;
  const Fp2 g = d + b;
  const Fp2 f = g - c;
  const Fp2 h = d - b;
  return {e * f, g * h, f * g, e * h};
}

bool extended_equal(const ExtendedPoint& p, const ExtendedPoint& q) {
  return p.X * q.Z == q.X * p.Z && p.Y * q.Z == q.Y * p.Z;
}

bool is_on_curve(const Fp2& x, const Fp2& y) {
  const Fp2 xx = square(x);
  const Fp2 yy = square(y);
  return yy - xx == Fp2::one() + params::kD * xx * yy;
}

CurvePoint CurvePoint::generator() { return {params::kGx, params::kGy}; }

CurvePoint CurvePoint::from_affine(const Fp2& x, const Fp2& y) {
  if (!is_on_curve(x, y)) throw CurveError(CurveError::Kind::kOffCurve, "point is not on FourQ");
  return {x, y};
}

CurvePoint CurvePoint::from_extended(const ExtendedPoint& p) {
  const Fp2 z_inv = invert(p.Z);
  return {p.X * z_inv, p.Y * z_inv};
}

ExtendedPoint CurvePoint::to_extended() const { return {x_, y_, Fp2::one(), x_ * y_}; }

CurvePoint point_add(const CurvePoint& p, const CurvePoint& q) {
  return CurvePoint::from_extended(extended_add(p.to_extended(), q.to_extended()));
}

CurvePoint point_double(const CurvePoint& p) { return CurvePoint::from_extended(extended_double(p.to_extended())); }

CurvePoint multiply_integer(const UInt256& k, const CurvePoint& p) {
  const ExtendedPoint base = p.to_extended();
  ExtendedPoint acc = extended_neutral();
  for (int i = 255; i >= 0; --i) {
    acc = extended_double(acc);
    const ExtendedPoint sum = extended_add(acc, base);
    acc = select(acc, sum, k.bit(static_cast<unsigned>(i)) ? 1 : 0);
  }
  return CurvePoint::from_extended(acc);
}

CurvePoint scalar_mul(const Scalar& k, const CurvePoint& p) { return multiply_integer(k.value(), p); }

CurvePoint clear_cofactor(const CurvePoint& p) { return multiply_integer(UInt256::from_u64(params::kCofactor), p); }

EncodedPoint point_encode(const CurvePoint& p) {
  EncodedPoint out{};
  store(p.x(), std::span<std::uint8_t, 32>(out.data(), 32));
  store(p.y(), std::span<std::uint8_t, 32>(out.data() + 32, 32));
  return out;
}

CurvePoint point_decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kEncodedPointSize) {
    throw CurveError(CurveError::Kind::kWrongLength, "encoded point must be 64 octets");
  }
  Fp2 x, y;
  try {
    x = load(bytes.subspan<0, 32>());
    y = load(bytes.subspan<32, 32>());
  } catch (const FieldError&) {
    throw CurveError(CurveError::Kind::kNonCanonical, "encoded coordinate is not canonical");
  }
  return CurvePoint::from_affine(x, y);
}

}  // namespace airloc::fourq
