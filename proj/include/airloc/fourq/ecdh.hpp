#pragma once

// Ephemeral Diffie-Hellman on FourQ.
//
// Shared point: S = secret * (392 * peer), the same co-factor handling as
// the FourQlib reference (its SecretAgreement returns the y coordinate of
// S).  The 128-bit session key is the first 16 octets of SHA-256 over the
// 64-octet encoding of S.

#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <span>

#include "airloc/fourq/curve.hpp"

namespace airloc::fourq {

class EntropySource {
 public:
  virtual ~EntropySource() = default;
  // Fills `out` with uniformly random octets; throws on failure.
  virtual void fill(std::span<std::uint8_t> out) = 0;
};

// Operating-system CSPRNG (OpenSSL RAND_bytes).
class SystemEntropy final : public EntropySource {
 public:
  void fill(std::span<std::uint8_t> out) override;
};

// Deterministic stream for tests and reproducible demos.  Not for real keys.
class SeededEntropy final : public EntropySource {
 public:
  explicit SeededEntropy(std::uint64_t seed) : rng_(seed) {}
  void fill(std::span<std::uint8_t> out) override;

 private:
  std::mt19937_64 rng_;
};

struct KeyPair {
  Scalar secret;
  CurvePoint public_key;
};

using SharedKey = std::array<std::uint8_t, 16>;

// secret uniform in [1, N): 32 random octets reduced mod N, redrawn on zero.
KeyPair keygen(EntropySource& entropy);

// Throws CurveError(kSmallSubgroup) when 392 * peer is neutral and
// CurveError(kNeutralResult) when S is neutral.
CurvePoint ecdh_shared_point(const Scalar& my_secret, const CurvePoint& peer_public);
SharedKey ecdh_shared_key(const Scalar& my_secret, const CurvePoint& peer_public);

// Key derivation from a shared point.  Throws CurveError(kZeroKey) for an
// all-zero result.
SharedKey derive_session_key(const CurvePoint& shared);

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data);

}  // namespace airloc::fourq
