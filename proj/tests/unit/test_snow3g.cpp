#include <doctest.h>

#include <bit>
#include <fstream>
#include <random>
#include <sstream>

#include "airloc/hex.hpp"
#include "airloc/snow3g.hpp"
#include "support.hpp"

using namespace airloc;
using namespace airloc::snow3g;

namespace {

template <std::size_t N>
std::array<std::uint8_t, N> unhex(const std::string& s) {
  const auto v = hex::decode_fixed<N>(s);
  REQUIRE(v.has_value());
  return *v;
}

std::uint32_t word_of(const std::string& s) { return static_cast<std::uint32_t>(std::stoul(s, nullptr, 16)); }

Key random_key(std::mt19937_64& rng) {
  Key k{};
  for (auto& b : k) b = static_cast<std::uint8_t>(rng());
  return k;
}

}  // namespace

TEST_CASE("published keystream test sets") {
  std::ifstream in(test::fixture("snow3g_vectors.txt"));
  REQUIRE(in);
  std::string line;
  int sets = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string key, iv, z1, z2;
    fields >> key >> iv >> z1 >> z2;
    CAPTURE(line);
    CipherState s = initialize(unhex<16>(key), unhex<16>(iv));
    CHECK(next_word(s) == word_of(z1));
    CHECK(next_word(s) == word_of(z2));
    ++sets;
  }
  CHECK(sets == 4);
}

// Reference values below come from an independent implementation that
// derives every table entry from the field arithmetic.
TEST_CASE("S-boxes and LFSR multipliers") {
  CHECK(sbox_s1(0x00000000) == 0x63636363);
  CHECK(sbox_s1(0x01234567) == 0x24234ff9);
  CHECK(sbox_s1(0xdeadbeef) == 0x7b6721c4);
  CHECK(sbox_s1(0xffffffff) == 0x16161616);
  CHECK(sbox_s2(0x00000000) == 0x25252525);
  CHECK(sbox_s2(0x01234567) == 0x40cd6630);
  CHECK(sbox_s2(0xdeadbeef) == 0x34351508);
  CHECK(sbox_s2(0xffffffff) == 0x86868686);

  CHECK(mul_alpha(0x00) == 0x00000000);
  CHECK(mul_alpha(0x01) == 0xe19fcf13);
  CHECK(mul_alpha(0x80) == 0x50358897);
  CHECK(mul_alpha(0xff) == 0x3f53b5eb);
  CHECK(div_alpha(0x00) == 0x00000000);
  CHECK(div_alpha(0x01) == 0x180f40cd);
  CHECK(div_alpha(0x80) == 0xe18d0321);
  CHECK(div_alpha(0xff) == 0xb6f3a5e2);

  // Both maps are GF(2)-linear in c.
  for (unsigned a = 0; a < 256; ++a) {
    for (unsigned b = 0; b < 256; b += 17) {
      const auto c = static_cast<std::uint8_t>(a ^ b);
      REQUIRE(mul_alpha(c) == (mul_alpha(static_cast<std::uint8_t>(a)) ^ mul_alpha(static_cast<std::uint8_t>(b))));
      REQUIRE(div_alpha(c) == (div_alpha(static_cast<std::uint8_t>(a)) ^ div_alpha(static_cast<std::uint8_t>(b))));
    }
  }
}

TEST_CASE("state after initialization with an all-zero key and IV") {
  const CipherState s = initialize(Key{}, Iv{});
  const std::array<std::uint32_t, 16> lfsr{0xf8dc4098, 0xcd42e1e9, 0xda324e48, 0xa0641002, 0xfd3163e6, 0x0fe10ef2,
                                           0x674a1228, 0xdb5d543c, 0x8546f7aa, 0x8689e832, 0x176df401, 0xa577cfbe,
                                           0xda5dbd4a, 0xe06e7295, 0x0d9b1284, 0xb38a0ad0};
  CHECK(s.lfsr.s == lfsr);
  CHECK(s.fsm == FsmState{0xee73171d, 0x9e45c142, 0x99786ef3});
  CHECK(s.mode == Mode::kKeystream);

  CipherState t = s;
  CHECK(keystream(t, 4) == std::vector<std::uint32_t>{0xc764a037, 0xb12fc857, 0xd470c3a5, 0xe24d982c});
}

TEST_CASE("keystream is deterministic over 10000 words") {
  const Key key = unhex<16>("2bd6459f82c5b300952c49104881ff48");
  const Iv iv = unhex<16>("ea024714ad5c4d84df1f9b251c0bf45f");
  CipherState a = initialize(key, iv);
  CipherState b = initialize(key, iv);
  const auto wa = keystream(a, 10000);
  std::vector<std::uint32_t> wb;
  for (int i = 0; i < 10000; ++i) wb.push_back(next_word(b));
  CHECK(wa == wb);
  CHECK(wa[9999] == 0xad328e69);
  CHECK(a == b);
}

TEST_CASE("key avalanche") {
  std::mt19937_64 rng(31);
  const Key key = random_key(rng);
  Iv iv{};
  for (auto& b : iv) b = static_cast<std::uint8_t>(rng());
  CipherState base = initialize(key, iv);
  const auto ref = keystream(base, 8);
  int total = 0;
  for (int bit = 0; bit < 128; ++bit) {
    Key k = key;
    k[static_cast<std::size_t>(bit / 8)] ^= static_cast<std::uint8_t>(0x80 >> (bit % 8));
    CipherState s = initialize(k, iv);
    const auto w = keystream(s, 8);
    int diff = 0;
    for (std::size_t i = 0; i < 8; ++i) diff += std::popcount(w[i] ^ ref[i]);
    CAPTURE(bit);
    REQUIRE(diff >= 80);
    REQUIRE(diff <= 176);
    total += diff;
  }
  CHECK(std::abs(total / 128.0 - 128.0) < 8.0);
}

TEST_CASE("xor_encrypt is an involution") {
  std::mt19937_64 rng(32);
  const Key key = random_key(rng);
  const Iv iv = random_key(rng);
  for (std::size_t len = 0; len <= 4096; ++len) {
    std::vector<std::uint8_t> msg(len);
    for (auto& b : msg) b = static_cast<std::uint8_t>(rng());
    const auto ct = xor_encrypt(key, iv, msg);
    REQUIRE(ct.size() == len);
    REQUIRE(xor_encrypt(key, iv, ct) == msg);
  }
  CHECK(xor_encrypt(key, iv, {}).empty());
}

TEST_CASE("encrypting zeros yields the big-endian keystream") {
  const Key key = unhex<16>("2bd6459f82c5b300952c49104881ff48");
  const Iv iv = unhex<16>("ea024714ad5c4d84df1f9b251c0bf45f");
  const std::vector<std::uint8_t> zeros(7, 0);
  CHECK(xor_encrypt(key, iv, zeros) == std::vector<std::uint8_t>{0xab, 0xee, 0x97, 0x04, 0x7a, 0xc3, 0x13});

  std::vector<std::uint8_t> buf(1000, 0);
  xor_in_place(key, iv, buf);
  CipherState s = initialize(key, iv);
  for (std::size_t i = 0; i < buf.size(); i += 4) {
    const std::uint32_t w = next_word(s);
    for (std::size_t j = 0; j < 4; ++j) REQUIRE(buf[i + j] == static_cast<std::uint8_t>(w >> (24 - 8 * j)));
  }
}

TEST_CASE("keystream before initialization is rejected") {
  CipherState s;
  CHECK_THROWS_AS(next_word(s), SnowError);
  CHECK_THROWS_AS(keystream(s, 1), SnowError);
}
