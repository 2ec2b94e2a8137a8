#include "airloc/secure_link/session.hpp"

#include <openssl/crypto.h>

#include <future>
#include <limits>

namespace airloc::link {

namespace {

struct SecretGuard {
  fourq::Scalar& secret;
  ~SecretGuard() { secret.wipe(); }
};

fourq::CurvePoint validated_peer(const HandshakeMessage& m) {
  try {
    fourq::CurvePoint p = fourq::point_decode(m.ephemeral_public);
    if (fourq::clear_cofactor(p).is_neutral()) {
      throw LinkError(LinkError::Kind::kInvalidPoint, "peer ephemeral lies in a small subgroup");
    }
    return p;
  } catch (const fourq::CurveError& e) {
    throw LinkError(LinkError::Kind::kInvalidPoint, std::string("peer ephemeral rejected: ") + e.what());
  }
}

fourq::SharedKey agree(const fourq::Scalar& secret, const fourq::CurvePoint& peer) {
  try {
    return fourq::ecdh_shared_key(secret, peer);
  } catch (const fourq::CurveError& e) {
    throw LinkError(LinkError::Kind::kInvalidPoint, std::string("key agreement failed: ") + e.what());
  }
}

}  // namespace

Session::~Session() { OPENSSL_cleanse(key_.data(), key_.size()); }

Frame Session::seal_bytes(std::span<const std::uint8_t> plaintext) {
  if (terminated_ || send_counter_ == std::numeric_limits<std::uint32_t>::max()) {
    terminated_ = true;
    throw LinkError(LinkError::Kind::kCounterExhausted, "send counter exhausted; session terminated");
  }
  Frame f;
  f.salt = salt_;
  f.counter = ++send_counter_;
  f.direction = send_direction();
  f.ciphertext = snow3g::xor_encrypt(key_, make_iv(f.salt, f.counter, f.direction), plaintext);
  return f;
}

Frame Session::seal(const SensorPayload& payload) { return seal_bytes(serialize(payload)); }

Frame Session::seal_end_of_stream() { return seal_bytes({}); }

std::vector<std::uint8_t> Session::open_bytes(const Frame& frame) {
  if (frame.salt != salt_) throw LinkError(LinkError::Kind::kWrongSalt, "frame salt does not belong to this session");
  if (frame.direction != recv_direction()) throw LinkError(LinkError::Kind::kWrongDirection, "frame direction mismatch");
  if (frame.counter <= recv_counter_) {
    throw LinkError(LinkError::Kind::kReplay, "replayed counter " + std::to_string(frame.counter) +
                                                  " (last accepted " + std::to_string(recv_counter_) + ")");
  }
  auto plain = snow3g::xor_encrypt(key_, make_iv(frame.salt, frame.counter, frame.direction), frame.ciphertext);
  recv_counter_ = frame.counter;
  return plain;
}

std::optional<SensorPayload> Session::open(const Frame& frame) {
  if (frame.ciphertext.empty() || frame.ciphertext.size() == kSensorPayloadSize) {
    const auto plain = open_bytes(frame);
    if (plain.empty()) return std::nullopt;
    return parse_sensor_payload(plain);
  }
  throw LinkError(LinkError::Kind::kMalformed, "frame body is not a sensor payload");
}

Session device_handshake(Transport& t, fourq::EntropySource& entropy, std::chrono::milliseconds timeout) {
  fourq::KeyPair kp = fourq::keygen(entropy);
  SecretGuard guard{kp.secret};
  t.send(encode_handshake({Role::kDevice, fourq::point_encode(kp.public_key), std::nullopt}));

  const HandshakeMessage reply = decode_handshake(t.receive_exact(kPhoneHelloSize, timeout));
  if (reply.role != Role::kPhone) throw LinkError(LinkError::Kind::kWrongRole, "expected the phone's handshake");
  const fourq::CurvePoint peer = validated_peer(reply);
  return Session(Role::kDevice, agree(kp.secret, peer), *reply.session_salt);
}

Session phone_handshake(Transport& t, fourq::EntropySource& entropy, std::chrono::milliseconds timeout) {
  const auto first = t.receive_exact(1, timeout);
  if (first[0] != static_cast<std::uint8_t>(Role::kDevice)) {
    throw LinkError(LinkError::Kind::kWrongRole, "expected the device's handshake");
  }
  auto rest = t.receive_exact(kDeviceHelloSize - 1, timeout);
  rest.insert(rest.begin(), first[0]);
  const fourq::CurvePoint peer = validated_peer(decode_handshake(rest));

  fourq::KeyPair kp = fourq::keygen(entropy);
  SecretGuard guard{kp.secret};
  Salt salt{};
  entropy.fill(salt);
  const fourq::SharedKey key = agree(kp.secret, peer);
  t.send(encode_handshake({Role::kPhone, fourq::point_encode(kp.public_key), salt}));
  return Session(Role::kPhone, key, salt);
}

std::pair<Session, Session> handshake(Transport& device_end, Transport& phone_end,
                                      fourq::EntropySource& device_entropy, fourq::EntropySource& phone_entropy,
                                      std::chrono::milliseconds timeout) {
  auto phone = std::async(std::launch::async, [&] {
    try {
      return phone_handshake(phone_end, phone_entropy, timeout);
    } catch (...) {
      phone_end.close();
      throw;
    }
  });
  std::optional<Session> device;
  try {
    device.emplace(device_handshake(device_end, device_entropy, timeout));
  } catch (...) {
    device_end.close();
    try {
      phone.get();
    } catch (...) {
    }
    throw;
  }
  Session p = phone.get();
  return {std::move(*device), std::move(p)};
}

Frame receive_frame(Transport& t, std::chrono::milliseconds timeout) {
  const auto head = t.receive_exact(kFrameHeaderSize, timeout);
  const FrameHeader h = decode_frame_header(std::span<const std::uint8_t, kFrameHeaderSize>(head.data(), head.size()));
  Frame f{h.salt, h.counter, h.direction, {}};
  if (h.length > 0) f.ciphertext = t.receive_exact(h.length, timeout);
  return f;
}

}  // namespace airloc::link
