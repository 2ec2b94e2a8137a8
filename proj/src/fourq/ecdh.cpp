#include "airloc/fourq/ecdh.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <algorithm>

namespace airloc::fourq {

void SystemEntropy::fill(std::span<std::uint8_t> out) {
  if (out.empty()) return;
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    throw CurveError(CurveError::Kind::kEntropy, "system entropy source failed");
  }
}

void SeededEntropy::fill(std::span<std::uint8_t> out) {
  std::size_t i = 0;
  while (i < out.size()) {
    std::uint64_t w = rng_();
    for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
      out[i] = static_cast<std::uint8_t>(w);
      w >>= 8;
    }
  }
}

KeyPair keygen(EntropySource& entropy) {
  std::array<std::uint8_t, 32> buf{};
  for (int attempt = 0; attempt < 64; ++attempt) {
    entropy.fill(buf);
    Scalar secret = Scalar::from_bytes(buf);
    OPENSSL_cleanse(buf.data(), buf.size());
    if (secret.is_zero()) continue;
    return {secret, scalar_mul(secret, CurvePoint::generator())};
  }
  throw CurveError(CurveError::Kind::kEntropy, "entropy source keeps producing a zero scalar");
}

CurvePoint ecdh_shared_point(const Scalar& my_secret, const CurvePoint& peer_public) {
  const CurvePoint cleared = clear_cofactor(peer_public);
  if (cleared.is_neutral()) throw CurveError(CurveError::Kind::kSmallSubgroup, "peer point is in a small subgroup");
  const CurvePoint shared = scalar_mul(my_secret, cleared);
  if (shared.is_neutral()) throw CurveError(CurveError::Kind::kNeutralResult, "shared point is neutral");
  return shared;
}

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data) {
  std::array<std::uint8_t, 32> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1 || len != digest.size()) {
    throw std::runtime_error("SHA-256 failed");
  }
  return digest;
}

SharedKey derive_session_key(const CurvePoint& shared) {
  EncodedPoint enc = point_encode(shared);
  auto digest = sha256(enc);
  SharedKey key{};
  std::copy_n(digest.begin(), key.size(), key.begin());
  OPENSSL_cleanse(enc.data(), enc.size());
  OPENSSL_cleanse(digest.data(), digest.size());
  if (std::all_of(key.begin(), key.end(), [](std::uint8_t b) { return b == 0; })) {
    throw CurveError(CurveError::Kind::kZeroKey, "derived key is all zero");
  }
  return key;
}

SharedKey ecdh_shared_key(const Scalar& my_secret, const CurvePoint& peer_public) {
  return derive_session_key(ecdh_shared_point(my_secret, peer_public));
}

}  // namespace airloc::fourq
