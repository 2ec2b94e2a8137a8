#pragma once

// Per-connection session: an unauthenticated ephemeral FourQ handshake
// followed by SNOW 3G encrypted frames.
//
// The device speaks first (role || point); the phone answers with its own
// ephemeral point and a fresh 8-octet salt.  Both sides derive the same
// one-time key and erase their ephemeral secret.  Every reconnect runs a new
// handshake, so no key, salt or identifier outlives a connection.
//
// Frames carry no MAC.  Replays are rejected through the counter rule, but
// bit flips in the ciphertext go undetected.

#include <chrono>
#include <optional>
#include <utility>

#include "airloc/fourq/ecdh.hpp"
#include "airloc/secure_link/transport.hpp"
#include "airloc/secure_link/wire.hpp"

namespace airloc::link {

class Session {
 public:
  Session(Role role, const fourq::SharedKey& key, const Salt& salt) : role_(role), key_(key), salt_(salt) {}
  ~Session();
  Session(const Session&) = default;
  Session& operator=(const Session&) = default;
  Session(Session&&) = default;
  Session& operator=(Session&&) = default;

  Role role() const { return role_; }
  const fourq::SharedKey& key() const { return key_; }
  const Salt& salt() const { return salt_; }
  std::uint32_t send_counter() const { return send_counter_; }
  std::uint32_t recv_counter() const { return recv_counter_; }
  bool terminated() const { return terminated_; }

  // The first frame uses counter 1.  Throws LinkError(kCounterExhausted)
  // once the 32-bit counter would wrap; the session is terminated from then on.
  Frame seal(const SensorPayload& payload);
  // Zero-length frame closing the stream.
  Frame seal_end_of_stream();
  Frame seal_bytes(std::span<const std::uint8_t> plaintext);

  // nullopt for the end-of-stream frame.  Throws LinkError: kWrongSalt,
  // kWrongDirection, kReplay (counter <= last accepted; state unchanged),
  // kMalformed for a body that is not a sensor payload.
  std::optional<SensorPayload> open(const Frame& frame);
  std::vector<std::uint8_t> open_bytes(const Frame& frame);

  Direction send_direction() const {
    return role_ == Role::kDevice ? Direction::kDeviceToPhone : Direction::kPhoneToDevice;
  }
  Direction recv_direction() const {
    return role_ == Role::kDevice ? Direction::kPhoneToDevice : Direction::kDeviceToPhone;
  }

 private:
  Role role_;
  fourq::SharedKey key_;
  Salt salt_;
  std::uint32_t send_counter_ = 0;
  std::uint32_t recv_counter_ = 0;
  bool terminated_ = false;
};

inline constexpr std::chrono::milliseconds kDefaultTimeout{5000};

// One endpoint each.  Throw LinkError: kInvalidPoint for a point that is
// off-curve, non-canonical or in a small subgroup, kWrongRole, kTimeout,
// kClosed.
Session device_handshake(Transport& t, fourq::EntropySource& entropy,
                         std::chrono::milliseconds timeout = kDefaultTimeout);
Session phone_handshake(Transport& t, fourq::EntropySource& entropy,
                        std::chrono::milliseconds timeout = kDefaultTimeout);

// Runs both endpoints concurrently over the two ends of a transport pair.
// Returns (device session, phone session).
std::pair<Session, Session> handshake(Transport& device_end, Transport& phone_end,
                                      fourq::EntropySource& device_entropy, fourq::EntropySource& phone_entropy,
                                      std::chrono::milliseconds timeout = kDefaultTimeout);

// Reads one complete frame from the transport.
Frame receive_frame(Transport& t, std::chrono::milliseconds timeout = kDefaultTimeout);

}  // namespace airloc::link
