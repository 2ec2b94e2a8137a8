#pragma once

// SNOW 3G keystream generator (the UEA2 core): a 16-stage LFSR of 32-bit
// words over GF(2^32) and a three-register FSM with the S1/S2 word S-boxes.
// Keys, IVs and keystream words are big-endian.

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace airloc::snow3g {

class SnowError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

using Key = std::array<std::uint8_t, 16>;
using Iv = std::array<std::uint8_t, 16>;

struct LfsrState {
  std::array<std::uint32_t, 16> s{};  // s[0] is the oldest stage
  friend bool operator==(const LfsrState&, const LfsrState&) = default;
};

struct FsmState {
  std::uint32_t r1 = 0;
  std::uint32_t r2 = 0;
  std::uint32_t r3 = 0;
  friend bool operator==(const FsmState&, const FsmState&) = default;
};

enum class Mode { kUninitialized, kKeystream };

struct CipherState {
  LfsrState lfsr;
  FsmState fsm;
  Mode mode = Mode::kUninitialized;
  friend bool operator==(const CipherState&, const CipherState&) = default;
};

std::uint32_t sbox_s1(std::uint32_t w);
std::uint32_t sbox_s2(std::uint32_t w);
// The LFSR feedback multipliers, exposed for testing.
std::uint32_t mul_alpha(std::uint8_t c);
std::uint32_t div_alpha(std::uint8_t c);

// Loads key and IV, runs the 32 initialization clocks (FSM output fed back
// into the LFSR) plus the clock that discards the first FSM output, and
// leaves the state in keystream mode.  No keystream is produced.
CipherState initialize(const Key& key, const Iv& iv);

// Next keystream word z_t.  Throws SnowError before initialize.
std::uint32_t next_word(CipherState& state);

std::vector<std::uint32_t> keystream(CipherState& state, std::size_t words);

inline constexpr std::uint64_t kMaxMessageOctets = std::uint64_t{1} << 32;

// data XOR keystream, words serialized big-endian, the last partial word
// truncated.  Encryption and decryption are the same call.  Throws
// SnowError above kMaxMessageOctets.
std::vector<std::uint8_t> xor_encrypt(const Key& key, const Iv& iv, std::span<const std::uint8_t> data);
void xor_in_place(const Key& key, const Iv& iv, std::span<std::uint8_t> data);

}  // namespace airloc::snow3g
