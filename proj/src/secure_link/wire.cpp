#include "airloc/secure_link/wire.hpp"

#include <algorithm>

namespace airloc::link {

namespace {

void put_u32(std::uint8_t* out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out[i] = static_cast<std::uint8_t>(v >> (24 - 8 * i));
}

std::uint32_t get_u32(const std::uint8_t* in) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | in[i];
  return v;
}

Direction parse_direction(std::uint8_t b) {
  if (b > 1) throw LinkError(LinkError::Kind::kMalformed, "unknown frame direction " + std::to_string(b));
  return static_cast<Direction>(b);
}

}  // namespace

const char* to_string(LinkError::Kind kind) {
  switch (kind) {
    case LinkError::Kind::kMalformed: return "malformed";
    case LinkError::Kind::kTruncated: return "truncated";
    case LinkError::Kind::kInvalidPoint: return "invalid-point";
    case LinkError::Kind::kWrongRole: return "wrong-role";
    case LinkError::Kind::kWrongSalt: return "wrong-salt";
    case LinkError::Kind::kWrongDirection: return "wrong-direction";
    case LinkError::Kind::kReplay: return "replay";
    case LinkError::Kind::kCounterExhausted: return "counter-exhausted";
    case LinkError::Kind::kTimeout: return "timeout";
    case LinkError::Kind::kClosed: return "closed";
    case LinkError::Kind::kTransport: return "transport";
  }
  return "unknown";
}

std::vector<std::uint8_t> encode_handshake(const HandshakeMessage& m) {
  if (m.session_salt.has_value() != (m.role == Role::kPhone)) {
    throw LinkError(LinkError::Kind::kMalformed, "salt must be present exactly in the phone's message");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kPhoneHelloSize);
  out.push_back(static_cast<std::uint8_t>(m.role));
  out.insert(out.end(), m.ephemeral_public.begin(), m.ephemeral_public.end());
  if (m.session_salt) out.insert(out.end(), m.session_salt->begin(), m.session_salt->end());
  return out;
}

HandshakeMessage decode_handshake(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw LinkError(LinkError::Kind::kTruncated, "empty handshake message");
  HandshakeMessage m;
  if (bytes[0] > 1) throw LinkError(LinkError::Kind::kMalformed, "unknown handshake role");
  m.role = static_cast<Role>(bytes[0]);
  const std::size_t want = m.role == Role::kPhone ? kPhoneHelloSize : kDeviceHelloSize;
  if (bytes.size() < want) throw LinkError(LinkError::Kind::kTruncated, "short handshake message");
  if (bytes.size() > want) throw LinkError(LinkError::Kind::kMalformed, "trailing octets after handshake message");
  std::copy_n(bytes.begin() + 1, fourq::kEncodedPointSize, m.ephemeral_public.begin());
  if (m.role == Role::kPhone) {
    Salt s{};
    std::copy_n(bytes.begin() + kDeviceHelloSize, s.size(), s.begin());
    m.session_salt = s;
  }
  return m;
}

std::vector<std::uint8_t> encode_frame(const Frame& f) {
  if (f.ciphertext.size() > kMaxFrameBody) throw LinkError(LinkError::Kind::kMalformed, "frame body too large");
  std::vector<std::uint8_t> out(kFrameHeaderSize + f.ciphertext.size());
  std::copy(f.salt.begin(), f.salt.end(), out.begin());
  put_u32(out.data() + 8, f.counter);
  out[12] = static_cast<std::uint8_t>(f.direction);
  put_u32(out.data() + 13, static_cast<std::uint32_t>(f.ciphertext.size()));
  std::copy(f.ciphertext.begin(), f.ciphertext.end(), out.begin() + kFrameHeaderSize);
  return out;
}

FrameHeader decode_frame_header(std::span<const std::uint8_t, kFrameHeaderSize> bytes) {
  FrameHeader h;
  std::copy_n(bytes.begin(), 8, h.salt.begin());
  h.counter = get_u32(bytes.data() + 8);
  h.direction = parse_direction(bytes[12]);
  h.length = get_u32(bytes.data() + 13);
  if (h.length > kMaxFrameBody) throw LinkError(LinkError::Kind::kMalformed, "frame body too large");
  return h;
}

Frame decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFrameHeaderSize) throw LinkError(LinkError::Kind::kTruncated, "short frame header");
  const FrameHeader h = decode_frame_header(bytes.first<kFrameHeaderSize>());
  const std::size_t total = kFrameHeaderSize + h.length;
  if (bytes.size() < total) throw LinkError(LinkError::Kind::kTruncated, "frame body shorter than its length field");
  if (bytes.size() > total) throw LinkError(LinkError::Kind::kMalformed, "trailing octets after frame");
  return {h.salt, h.counter, h.direction, {bytes.begin() + kFrameHeaderSize, bytes.end()}};
}

snow3g::Iv make_iv(const Salt& salt, std::uint32_t counter, Direction direction) {
  snow3g::Iv iv{};
  std::copy(salt.begin(), salt.end(), iv.begin());
  put_u32(iv.data() + 8, counter);
  iv[12] = static_cast<std::uint8_t>(direction);
  return iv;
}

std::array<std::uint8_t, kSensorPayloadSize> serialize(const SensorPayload& p) {
  std::array<std::uint8_t, kSensorPayloadSize> out{};
  const auto t = static_cast<std::uint64_t>(p.t_us);
  put_u32(out.data(), static_cast<std::uint32_t>(t >> 32));
  put_u32(out.data() + 4, static_cast<std::uint32_t>(t));
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    put_u32(out.data() + 8 + 4 * i, static_cast<std::uint32_t>(p.values[i]));
  }
  return out;
}

SensorPayload parse_sensor_payload(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kSensorPayloadSize) {
    throw LinkError(bytes.size() < kSensorPayloadSize ? LinkError::Kind::kTruncated : LinkError::Kind::kMalformed,
                    "sensor payload must be 44 octets");
  }
  SensorPayload p;
  const std::uint64_t t = (std::uint64_t{get_u32(bytes.data())} << 32) | get_u32(bytes.data() + 4);
  p.t_us = static_cast<std::int64_t>(t);
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    p.values[i] = static_cast<std::int32_t>(get_u32(bytes.data() + 8 + 4 * i));
  }
  return p;
}

SensorPayload to_payload(const ImuSample& s) {
  using namespace device_grid;
  return {time_ticks(s.t),
          {accel_ticks(s.accel.x), accel_ticks(s.accel.y), accel_ticks(s.accel.z), gyro_ticks(s.gyro.x),
           gyro_ticks(s.gyro.y), gyro_ticks(s.gyro.z), mag_ticks(s.mag.x), mag_ticks(s.mag.y), mag_ticks(s.mag.z)}};
}

ImuSample to_sample(const SensorPayload& p) {
  using namespace device_grid;
  const auto& v = p.values;
  ImuSample s;
  s.t = time_from_ticks(p.t_us);
  s.accel = {accel_from_ticks(v[0]), accel_from_ticks(v[1]), accel_from_ticks(v[2]), Unit::kG};
  s.gyro = {gyro_from_ticks(v[3]), gyro_from_ticks(v[4]), gyro_from_ticks(v[5]), Unit::kDegPerSecond};
  s.mag = {mag_from_ticks(v[6]), mag_from_ticks(v[7]), mag_from_ticks(v[8]), Unit::kTesla};
  return s;
}

}  // namespace airloc::link
