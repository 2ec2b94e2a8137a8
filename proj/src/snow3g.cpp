#include "airloc/snow3g.hpp"

#include "airloc/simd/kernels.hpp"

namespace airloc::snow3g {

namespace {

using u8 = std::uint8_t;
using u32 = std::uint32_t;

constexpr u8 mulx(u8 v, u8 c) { return static_cast<u8>((v & 0x80) ? ((v << 1) ^ c) : (v << 1)); }

constexpr u8 mulx_pow(u8 v, int i, u8 c) {
  for (; i > 0; --i) v = mulx(v, c);
  return v;
}

constexpr u8 gf_mul(u8 a, u8 b, unsigned poly) {
  unsigned x = a, r = 0;
  while (b) {
    if (b & 1) r ^= x;
    x <<= 1;
    if (x & 0x100) x ^= poly;
    b >>= 1;
  }
  return static_cast<u8>(r);
}

constexpr u8 gf_pow(u8 a, unsigned e, unsigned poly) {
  u8 r = 1;
  for (; e; e >>= 1) {
    if (e & 1) r = gf_mul(r, a, poly);
    a = gf_mul(a, a, poly);
  }
  return r;
}

constexpr u8 rotl8(u8 x, int n) { return static_cast<u8>((x << n) | (x >> (8 - n))); }

// SR: the Rijndael S-box.
constexpr std::array<u8, 256> make_sr() {
  std::array<u8, 256> t{};
  for (unsigned x = 0; x < 256; ++x) {
    const u8 inv = x ? gf_pow(static_cast<u8>(x), 254, 0x11B) : 0;
    t[x] = inv ^ rotl8(inv, 1) ^ rotl8(inv, 2) ^ rotl8(inv, 3) ^ rotl8(inv, 4) ^ 0x63;
  }
  return t;
}

// SQ: Dickson polynomial g49 over GF(2^8) mod x^8 + x^6 + x^5 + x^3 + 1.
constexpr std::array<u8, 256> make_sq() {
  std::array<u8, 256> t{};
  constexpr unsigned kExp[] = {1, 9, 13, 15, 33, 41, 45, 47, 49};
  for (unsigned x = 0; x < 256; ++x) {
    u8 acc = 0x25;
    for (unsigned e : kExp) acc ^= gf_pow(static_cast<u8>(x), e, 0x169);
    t[x] = acc;
  }
  return t;
}

// Column-mixing T-tables: table j holds the contribution of input byte j
// (j = 0 is the most significant) to the output word.
constexpr std::array<std::array<u32, 256>, 4> make_word_tables(const std::array<u8, 256>& box, u8 poly) {
  std::array<std::array<u32, 256>, 4> t{};
  for (unsigned x = 0; x < 256; ++x) {
    const u32 s = box[x];
    const u32 m = mulx(box[x], poly);
    t[0][x] = (m << 24) | ((m ^ s) << 16) | (s << 8) | s;
    t[1][x] = (s << 24) | (m << 16) | ((m ^ s) << 8) | s;
    t[2][x] = (s << 24) | (s << 16) | (m << 8) | (m ^ s);
    t[3][x] = ((m ^ s) << 24) | (s << 16) | (s << 8) | m;
  }
  return t;
}

constexpr std::array<u32, 256> make_mul_alpha() {
  std::array<u32, 256> t{};
  for (unsigned c = 0; c < 256; ++c) {
    const u8 v = static_cast<u8>(c);
    t[c] = (u32{mulx_pow(v, 23, 0xA9)} << 24) | (u32{mulx_pow(v, 245, 0xA9)} << 16) |
           (u32{mulx_pow(v, 48, 0xA9)} << 8) | u32{mulx_pow(v, 239, 0xA9)};
  }
  return t;
}

constexpr std::array<u32, 256> make_div_alpha() {
  std::array<u32, 256> t{};
  for (unsigned c = 0; c < 256; ++c) {
    const u8 v = static_cast<u8>(c);
    t[c] = (u32{mulx_pow(v, 16, 0xA9)} << 24) | (u32{mulx_pow(v, 39, 0xA9)} << 16) |
           (u32{mulx_pow(v, 6, 0xA9)} << 8) | u32{mulx_pow(v, 64, 0xA9)};
  }
  return t;
}

constexpr auto kSR = make_sr();
constexpr auto kSQ = make_sq();
constexpr auto kS1 = make_word_tables(kSR, 0x1B);
constexpr auto kS2 = make_word_tables(kSQ, 0x69);
constexpr auto kMulAlpha = make_mul_alpha();
constexpr auto kDivAlpha = make_div_alpha();

static_assert(kSR[0x00] == 0x63 && kSR[0x53] == 0xED);

u32 apply(const std::array<std::array<u32, 256>, 4>& t, u32 w) {
  return t[0][w >> 24] ^ t[1][(w >> 16) & 0xFF] ^ t[2][(w >> 8) & 0xFF] ^ t[3][w & 0xFF];
}

u32 clock_fsm(CipherState& st) {
  auto& s = st.lfsr.s;
  auto& f = st.fsm;
  const u32 out = (s[15] + f.r1) ^ f.r2;
  const u32 r = f.r2 + (f.r3 ^ s[5]);
  f.r3 = apply(kS2, f.r2);
  f.r2 = apply(kS1, f.r1);
  f.r1 = r;
  return out;
}

void clock_lfsr(CipherState& st, u32 feedback) {
  auto& s = st.lfsr.s;
  const u32 v = (s[0] << 8) ^ kMulAlpha[s[0] >> 24] ^ s[2] ^ (s[11] >> 8) ^ kDivAlpha[s[11] & 0xFF] ^ feedback;
  for (int i = 0; i < 15; ++i) s[i] = s[i + 1];
  s[15] = v;
}

u32 load_be(const std::array<u8, 16>& b, int word) {
  return (u32{b[4 * word]} << 24) | (u32{b[4 * word + 1]} << 16) | (u32{b[4 * word + 2]} << 8) | b[4 * word + 3];
}

}  // namespace

std::uint32_t sbox_s1(std::uint32_t w) { return apply(kS1, w); }
std::uint32_t sbox_s2(std::uint32_t w) { return apply(kS2, w); }
std::uint32_t mul_alpha(std::uint8_t c) { return kMulAlpha[c]; }
std::uint32_t div_alpha(std::uint8_t c) { return kDivAlpha[c]; }

CipherState initialize(const Key& key, const Iv& iv) {
  const u32 k0 = load_be(key, 0), k1 = load_be(key, 1), k2 = load_be(key, 2), k3 = load_be(key, 3);
  const u32 iv0 = load_be(iv, 0), iv1 = load_be(iv, 1), iv2 = load_be(iv, 2), iv3 = load_be(iv, 3);
  constexpr u32 kOnes = 0xFFFFFFFF;

  CipherState st;
  auto& s = st.lfsr.s;
  s[15] = k3 ^ iv0;
  s[14] = k2;
  s[13] = k1;
  s[12] = k0 ^ iv1;
  s[11] = k3 ^ kOnes;
  s[10] = k2 ^ kOnes ^ iv2;
  s[9] = k1 ^ kOnes ^ iv3;
  s[8] = k0 ^ kOnes;
  s[7] = k3;
  s[6] = k2;
  s[5] = k1;
  s[4] = k0;
  s[3] = k3 ^ kOnes;
  s[2] = k2 ^ kOnes;
  s[1] = k1 ^ kOnes;
  s[0] = k0 ^ kOnes;

  for (int i = 0; i < 32; ++i) clock_lfsr(st, clock_fsm(st));
  clock_fsm(st);  // first output is discarded
  clock_lfsr(st, 0);
  st.mode = Mode::kKeystream;
  return st;
}

std::uint32_t next_word(CipherState& state) {
  if (state.mode != Mode::kKeystream) throw SnowError("SNOW 3G state used before initialization");
  const u32 z = clock_fsm(state) ^ state.lfsr.s[0];
  clock_lfsr(state, 0);
  return z;
}

std::vector<std::uint32_t> keystream(CipherState& state, std::size_t words) {
  std::vector<std::uint32_t> out(words);
  for (auto& w : out) w = next_word(state);
  return out;
}

void xor_in_place(const Key& key, const Iv& iv, std::span<std::uint8_t> data) {
  if (data.size() > kMaxMessageOctets) throw SnowError("message longer than 2^32 octets");
  CipherState st = initialize(key, iv);
  std::array<u8, 256> block{};
  for (std::size_t off = 0; off < data.size(); off += block.size()) {
    const std::size_t n = std::min(block.size(), data.size() - off);
    for (std::size_t i = 0; i < n; i += 4) {
      const u32 z = next_word(st);
      block[i] = static_cast<u8>(z >> 24);
      block[i + 1] = static_cast<u8>(z >> 16);
      block[i + 2] = static_cast<u8>(z >> 8);
      block[i + 3] = static_cast<u8>(z);
    }
    simd::xor_bytes(data.subspan(off, n), block);
  }
}

std::vector<std::uint8_t> xor_encrypt(const Key& key, const Iv& iv, std::span<const std::uint8_t> data) {
  std::vector<std::uint8_t> out(data.begin(), data.end());
  xor_in_place(key, iv, out);
  return out;
}

}  // namespace airloc::snow3g
