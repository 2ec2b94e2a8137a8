#pragma once

// Wire formats of the device <-> phone link.  All integers big-endian.
//
//   handshake  role[1] || point[64] || salt[8]      (salt only from the phone)
//   frame      salt[8] || counter[4] || direction[1] || length[4] || ciphertext[length]
//   payload    t_us[8] || 9 x int32 sensor ticks     (44 octets)
//
// The only cleartext in a frame is (salt, counter, direction, length).  A
// frame with length 0 marks the end of a stream.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "airloc/fourq/curve.hpp"
#include "airloc/imu.hpp"
#include "airloc/snow3g.hpp"

namespace airloc::link {

class LinkError : public std::runtime_error {
 public:
  enum class Kind {
    kMalformed,
    kTruncated,
    kInvalidPoint,
    kWrongRole,
    kWrongSalt,
    kWrongDirection,
    kReplay,
    kCounterExhausted,
    kTimeout,
    kClosed,
    kTransport,
  };

  LinkError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

const char* to_string(LinkError::Kind kind);

enum class Role : std::uint8_t { kDevice = 0, kPhone = 1 };
enum class Direction : std::uint8_t { kDeviceToPhone = 0, kPhoneToDevice = 1 };

using Salt = std::array<std::uint8_t, 8>;

struct HandshakeMessage {
  Role role = Role::kDevice;
  fourq::EncodedPoint ephemeral_public{};
  std::optional<Salt> session_salt;  // present exactly when role == kPhone

  friend bool operator==(const HandshakeMessage&, const HandshakeMessage&) = default;
};

inline constexpr std::size_t kDeviceHelloSize = 1 + fourq::kEncodedPointSize;
inline constexpr std::size_t kPhoneHelloSize = kDeviceHelloSize + 8;

std::vector<std::uint8_t> encode_handshake(const HandshakeMessage& m);
// Structural parse only; point validation happens in the handshake.
HandshakeMessage decode_handshake(std::span<const std::uint8_t> bytes);

struct Frame {
  Salt salt{};
  std::uint32_t counter = 0;
  Direction direction = Direction::kDeviceToPhone;
  std::vector<std::uint8_t> ciphertext;

  friend bool operator==(const Frame&, const Frame&) = default;
};

inline constexpr std::size_t kFrameHeaderSize = 8 + 4 + 1 + 4;
inline constexpr std::uint32_t kMaxFrameBody = 1u << 16;

std::vector<std::uint8_t> encode_frame(const Frame& f);
// Throws LinkError(kTruncated) when bytes are shorter than the header says
// and kMalformed for trailing bytes, unknown directions or oversize bodies.
Frame decode_frame(std::span<const std::uint8_t> bytes);

struct FrameHeader {
  Salt salt{};
  std::uint32_t counter = 0;
  Direction direction = Direction::kDeviceToPhone;
  std::uint32_t length = 0;
};
FrameHeader decode_frame_header(std::span<const std::uint8_t, kFrameHeaderSize> bytes);

// salt(64) || counter(32) || direction(8) || zero(24)
snow3g::Iv make_iv(const Salt& salt, std::uint32_t counter, Direction direction);

struct SensorPayload {
  std::int64_t t_us = 0;
  std::array<std::int32_t, 9> values{};  // accel, gyro, mag ticks on the device grid

  friend bool operator==(const SensorPayload&, const SensorPayload&) = default;
};

inline constexpr std::size_t kSensorPayloadSize = 44;

std::array<std::uint8_t, kSensorPayloadSize> serialize(const SensorPayload& p);
SensorPayload parse_sensor_payload(std::span<const std::uint8_t> bytes);

// Grid conversions.  to_payload throws TraceError for values outside the
// 32-bit tick range; to_sample(to_payload(s)) == s for on-grid samples.
SensorPayload to_payload(const ImuSample& s);
ImuSample to_sample(const SensorPayload& p);

}  // namespace airloc::link
