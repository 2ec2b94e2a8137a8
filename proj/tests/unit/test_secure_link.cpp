#include <doctest.h>

#include <future>
#include <mutex>
#include <random>
#include <set>

#include "airloc/secure_link/stream.hpp"
#include "airloc/simkit.hpp"

using namespace airloc;
using namespace airloc::link;
using namespace std::chrono_literals;

namespace {

LinkError::Kind error_kind(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const LinkError& e) {
    return e.kind();
  }
  FAIL("no LinkError thrown");
  return LinkError::Kind::kTransport;
}

std::pair<Session, Session> seeded_sessions(std::uint64_t seed) {
  auto ends = make_inproc_pair();
  auto& a = ends.first;
  auto& b = ends.second;
  fourq::SeededEntropy de(seed), pe(seed ^ 0x5555);
  return handshake(*a, *b, de, pe);
}

SensorPayload random_payload(std::mt19937_64& rng) {
  SensorPayload p;
  p.t_us = static_cast<std::int64_t>(rng());
  for (auto& v : p.values) v = static_cast<std::int32_t>(rng());
  return p;
}

// Records every octet sent through the wrapped transport.
class RecordingTransport final : public Transport {
 public:
  explicit RecordingTransport(Transport& inner) : inner_(inner) {}
  void send(std::span<const std::uint8_t> bytes) override {
    {
      std::lock_guard lock(mu_);
      log_.insert(log_.end(), bytes.begin(), bytes.end());
    }
    inner_.send(bytes);
  }
  std::vector<std::uint8_t> receive_exact(std::size_t n, std::chrono::milliseconds timeout) override {
    return inner_.receive_exact(n, timeout);
  }
  void close() override { inner_.close(); }
  std::vector<std::uint8_t> log() const {
    std::lock_guard lock(mu_);
    return log_;
  }

 private:
  Transport& inner_;
  mutable std::mutex mu_;
  std::vector<std::uint8_t> log_;
};

// Fails every send() from the given 0-based index on.
class BreakingTransport final : public Transport {
 public:
  BreakingTransport(Transport& inner, std::size_t break_at) : inner_(inner), break_at_(break_at) {}
  void send(std::span<const std::uint8_t> bytes) override {
    if (sends_++ >= break_at_) {
      inner_.close();
      throw LinkError(LinkError::Kind::kTransport, "link dropped");
    }
    inner_.send(bytes);
  }
  std::vector<std::uint8_t> receive_exact(std::size_t n, std::chrono::milliseconds timeout) override {
    return inner_.receive_exact(n, timeout);
  }
  void close() override { inner_.close(); }

 private:
  Transport& inner_;
  std::size_t break_at_;
  std::size_t sends_ = 0;
};

ImuTrace walk_trace(std::size_t samples) {
  const GroundTruthWalk walk = generate_walk({{0, 0}, {200, 0}, {200, 150}}, 0.7, 1.8);
  SensorModel m;
  m.accel_noise_std = 0.01;
  m.gyro_noise_std = 0.2;
  m.mag_noise_std = 2e-7;
  m.seed = 3;
  ImuTrace t = synthesize_imu(walk, m).trace;
  REQUIRE(t.size() >= samples);
  t.resize(samples);
  return t;
}

}  // namespace

TEST_CASE("wire encodings") {
  const Salt salt{1, 2, 3, 4, 5, 6, 7, 8};
  const Frame f{salt, 0x01020304, Direction::kPhoneToDevice, {0xAA, 0xBB}};
  const auto bytes = encode_frame(f);
  CHECK(bytes == std::vector<std::uint8_t>{1, 2, 3, 4, 5, 6, 7, 8, 1, 2, 3, 4, 1, 0, 0, 0, 2, 0xAA, 0xBB});
  CHECK(decode_frame(bytes) == f);
  CHECK(error_kind([&] { decode_frame(std::span(bytes).first(18)); }) == LinkError::Kind::kTruncated);
  CHECK(error_kind([&] { decode_frame(std::span(bytes).first(10)); }) == LinkError::Kind::kTruncated);
  auto longer = bytes;
  longer.push_back(0);
  CHECK(error_kind([&] { decode_frame(longer); }) == LinkError::Kind::kMalformed);
  auto bad_dir = bytes;
  bad_dir[12] = 7;
  CHECK(error_kind([&] { decode_frame(bad_dir); }) == LinkError::Kind::kMalformed);

  const snow3g::Iv iv = make_iv(salt, 0x01020304, Direction::kPhoneToDevice);
  CHECK(iv == snow3g::Iv{1, 2, 3, 4, 5, 6, 7, 8, 1, 2, 3, 4, 1, 0, 0, 0});

  SensorPayload p;
  p.t_us = 0x0102030405060708;
  p.values[0] = -2;
  const auto ser = serialize(p);
  CHECK(ser[0] == 0x01);
  CHECK(ser[7] == 0x08);
  CHECK(ser[8] == 0xFF);
  CHECK(ser[11] == 0xFE);
  CHECK(parse_sensor_payload(ser) == p);

  HandshakeMessage hello{Role::kPhone, {}, salt};
  hello.ephemeral_public[5] = 9;
  const auto hb = encode_handshake(hello);
  CHECK(hb.size() == kPhoneHelloSize);
  CHECK(hb[0] == 1);
  CHECK(decode_handshake(hb) == hello);
  CHECK_THROWS_AS(decode_handshake(std::span(hb).first(kDeviceHelloSize)), LinkError);
}

TEST_CASE("handshake agrees on one key") {
  for (auto make : {make_inproc_pair, make_socket_pair}) {
    auto ends = make();
    auto& a = ends.first;
    auto& b = ends.second;
    fourq::SystemEntropy e;
    auto sessions = handshake(*a, *b, e, e);
    auto& dev = sessions.first;
    auto& phone = sessions.second;
    CHECK(dev.key() == phone.key());
    CHECK(dev.salt() == phone.salt());
    CHECK(dev.role() == Role::kDevice);
    CHECK(phone.role() == Role::kPhone);
    CHECK(dev.key() != fourq::SharedKey{});
  }
}

TEST_CASE("seal/open round trip for 10^4 random payloads") {
  auto sessions = seeded_sessions(1);
  auto& dev = sessions.first;
  auto& phone = sessions.second;
  std::mt19937_64 rng(2);
  for (int i = 0; i < 10000; ++i) {
    const SensorPayload p = random_payload(rng);
    const Frame f = dev.seal(p);
    REQUIRE(f.counter == static_cast<std::uint32_t>(i + 1));
    REQUIRE(f.ciphertext.size() == kSensorPayloadSize);
    const auto back = phone.open(decode_frame(encode_frame(f)));
    REQUIRE(back.has_value());
    REQUIRE(*back == p);
  }
  // And the reverse direction.
  const SensorPayload p = random_payload(rng);
  CHECK(dev.open(phone.seal(p)) == p);
  CHECK_FALSE(phone.open(dev.seal_end_of_stream()).has_value());
}

TEST_CASE("replayed and stale frames are rejected") {
  auto sessions = seeded_sessions(3);
  auto& dev = sessions.first;
  auto& phone = sessions.second;
  std::mt19937_64 rng(4);
  const Frame f1 = dev.seal(random_payload(rng));
  const Frame f2 = dev.seal(random_payload(rng));
  const Frame f3 = dev.seal(random_payload(rng));
  CHECK(phone.open(f1).has_value());
  CHECK(error_kind([&] { phone.open(f1); }) == LinkError::Kind::kReplay);
  CHECK(phone.recv_counter() == 1);
  CHECK(phone.open(f3).has_value());
  CHECK(error_kind([&] { phone.open(f2); }) == LinkError::Kind::kReplay);
  CHECK(phone.recv_counter() == 3);
  CHECK_FALSE(phone.terminated());
}

TEST_CASE("frames from the wrong session or direction are rejected") {
  auto sessions = seeded_sessions(5);
  auto& dev = sessions.first;
  auto& phone = sessions.second;
  auto sessions2 = seeded_sessions(6);
  auto& dev2 = sessions2.first;
  std::mt19937_64 rng(7);
  const Frame other = dev2.seal(random_payload(rng));
  CHECK(error_kind([&] { phone.open(other); }) == LinkError::Kind::kWrongSalt);

  const Frame own = dev.seal(random_payload(rng));
  CHECK(error_kind([&] { dev.open(own); }) == LinkError::Kind::kWrongDirection);

  Frame short_body = dev.seal_bytes(std::vector<std::uint8_t>(10, 0));
  CHECK(error_kind([&] { phone.open(short_body); }) == LinkError::Kind::kMalformed);
}

TEST_CASE("1000 fresh sessions give 1000 distinct keys and salts") {
  std::set<fourq::SharedKey> keys;
  std::set<Salt> salts;
  fourq::SystemEntropy e;
  for (int i = 0; i < 1000; ++i) {
    auto ends = make_inproc_pair();
    auto& a = ends.first;
    auto& b = ends.second;
    auto sessions = handshake(*a, *b, e, e);
    auto& dev = sessions.first;
    auto& phone = sessions.second;
    REQUIRE(dev.key() == phone.key());
    keys.insert(dev.key());
    salts.insert(dev.salt());
  }
  CHECK(keys.size() == 1000);
  CHECK(salts.size() == 1000);
}

TEST_CASE("IVs never repeat within a session") {
  auto sessions = seeded_sessions(8);
  auto& dev = sessions.first;
  auto& phone = sessions.second;
  std::set<snow3g::Iv> ivs;
  std::size_t used = 0;
  const std::vector<std::uint8_t> body(4, 0);
  for (int i = 0; i < 20000; ++i) {
    Session& s = (i % 3 == 0) ? phone : dev;
    const Frame f = s.seal_bytes(body);
    ivs.insert(make_iv(f.salt, f.counter, f.direction));
    ++used;
  }
  CHECK(ivs.size() == used);
}

TEST_CASE("equal payloads in different sessions give different ciphertexts") {
  SensorPayload p;
  p.t_us = 10000;
  p.values = {0, 0, 1000000, 0, 0, 0, 20000, 0, -40000};
  std::set<std::vector<std::uint8_t>> seen;
  fourq::SystemEntropy e;
  for (int i = 0; i < 100; ++i) {
    auto ends = make_inproc_pair();
    auto& a = ends.first;
    auto& b = ends.second;
    auto sessions = handshake(*a, *b, e, e);
    seen.insert(sessions.first.seal(p).ciphertext);
  }
  CHECK(seen.size() == 100);
}

TEST_CASE("no cleartext octet outside the format skeleton repeats across sessions") {
  const ImuTrace trace = walk_trace(20);
  std::vector<std::vector<std::uint8_t>> device_logs, phone_logs;
  for (int i = 0; i < 100; ++i) {
    auto ends = make_inproc_pair();
    auto& a = ends.first;
    auto& b = ends.second;
    RecordingTransport dev_rec(*a), phone_rec(*b);
    const StreamResult r = stream_session(trace, dev_rec, phone_rec);
    REQUIRE(r.ok());
    device_logs.push_back(dev_rec.log());
    phone_logs.push_back(phone_rec.log());
  }

  // Skeleton: the role octet of each hello, and per frame the counter,
  // direction and length fields.  Ciphertext is excluded (it is not clear).
  const std::size_t frame_size = kFrameHeaderSize + kSensorPayloadSize;
  REQUIRE(device_logs[0].size() == kDeviceHelloSize + trace.size() * frame_size + kFrameHeaderSize);
  REQUIRE(phone_logs[0].size() == kPhoneHelloSize);

  auto varies = [](const std::vector<std::vector<std::uint8_t>>& logs, std::size_t pos) {
    for (const auto& l : logs) {
      if (l[pos] != logs[0][pos]) return true;
    }
    return false;
  };
  std::size_t checked = 0;
  for (std::size_t pos = 1; pos < kDeviceHelloSize; ++pos, ++checked) CHECK(varies(device_logs, pos));
  for (std::size_t pos = 1; pos < kPhoneHelloSize; ++pos, ++checked) CHECK(varies(phone_logs, pos));
  for (std::size_t k = 0; k <= trace.size(); ++k) {
    const std::size_t base = kDeviceHelloSize + k * frame_size;
    for (std::size_t pos = base; pos < base + 8; ++pos, ++checked) REQUIRE(varies(device_logs, pos));
    // The frame salt is the one the phone chose for this session.
    for (std::size_t s = 0; s < 100; ++s) {
      REQUIRE(std::equal(device_logs[s].begin() + static_cast<std::ptrdiff_t>(base),
                         device_logs[s].begin() + static_cast<std::ptrdiff_t>(base + 8),
                         phone_logs[s].begin() + static_cast<std::ptrdiff_t>(kDeviceHelloSize)));
    }
  }
  CHECK(checked == 64 + 72 + 8 * (trace.size() + 1));
}

TEST_CASE("handshake aborts on invalid points") {
  auto expect_rejected = [](const fourq::EncodedPoint& point) {
    auto ends = make_inproc_pair();
    auto& a = ends.first;
    auto& b = ends.second;
    fourq::SystemEntropy e;
    auto phone = std::async(std::launch::async, [&] { return phone_handshake(*b, e, 2000ms); });
    a->send(encode_handshake({Role::kDevice, point, std::nullopt}));
    try {
      phone.get();
      FAIL("phone accepted the point");
    } catch (const LinkError& err) {
      CHECK(err.kind() == LinkError::Kind::kInvalidPoint);
    }
  };
  fourq::EncodedPoint off = fourq::point_encode(fourq::CurvePoint::generator());
  off[0] ^= 1;
  expect_rejected(off);
  expect_rejected(fourq::point_encode(fourq::CurvePoint::neutral()));
  fourq::EncodedPoint non_canonical{};
  std::fill(non_canonical.begin(), non_canonical.begin() + 16, 0xFF);
  expect_rejected(non_canonical);

  // Same checks on the device side against a bad phone reply.
  auto ends = make_inproc_pair();
  auto& a = ends.first;
  auto& b = ends.second;
  fourq::SystemEntropy e;
  auto dev = std::async(std::launch::async, [&] { return device_handshake(*a, e, 2000ms); });
  b->receive_exact(kDeviceHelloSize, 2000ms);
  b->send(encode_handshake({Role::kPhone, off, Salt{}}));
  CHECK_THROWS_AS(dev.get(), LinkError);
}

TEST_CASE("handshake rejects a wrong role and times out on silence") {
  auto ends = make_inproc_pair();
  auto& a = ends.first;
  auto& b = ends.second;
  fourq::SystemEntropy e;
  auto phone = std::async(std::launch::async, [&] { return phone_handshake(*b, e, 2000ms); });
  a->send(std::vector<std::uint8_t>(kDeviceHelloSize, 1));
  CHECK(error_kind([&] { phone.get(); }) == LinkError::Kind::kWrongRole);

  auto ends2 = make_inproc_pair();
  auto& c = ends2.first;
  auto& d = ends2.second;
  CHECK(error_kind([&] { phone_handshake(*d, e, 50ms); }) == LinkError::Kind::kTimeout);
  CHECK(error_kind([&] { receive_frame(*c, 50ms); }) == LinkError::Kind::kTimeout);
  c->close();
  CHECK(error_kind([&] { receive_frame(*d, 50ms); }) == LinkError::Kind::kClosed);
}

TEST_CASE("truncated frame on the wire") {
  for (auto make : {make_inproc_pair, make_socket_pair}) {
    auto ends = make();
    auto& a = ends.first;
    auto& b = ends.second;
    const auto bytes = encode_frame({Salt{}, 1, Direction::kDeviceToPhone, std::vector<std::uint8_t>(44, 0)});
    a->send(std::span(bytes).first(30));
    a->close();
    CHECK(error_kind([&] { receive_frame(*b, 500ms); }) == LinkError::Kind::kClosed);
  }
}

TEST_CASE("stream delivers 10^4 samples bitwise") {
  const ImuTrace trace = walk_trace(10000);
  for (auto make : {make_inproc_pair, make_socket_pair}) {
    auto ends = make();
    auto& a = ends.first;
    auto& b = ends.second;
    const StreamResult r = stream_session(trace, *a, *b);
    REQUIRE(r.ok());
    CHECK(r.frames_sent == trace.size());
    CHECK(r.replay_rejections == 0);
    CHECK(bitwise_equal(r.delivered, trace));
  }
}

TEST_CASE("empty stream closes cleanly") {
  auto ends = make_inproc_pair();
  auto& a = ends.first;
  auto& b = ends.second;
  const StreamResult r = stream_session({}, *a, *b);
  CHECK(r.ok());
  CHECK(r.delivered.empty());
  CHECK(r.frames_sent == 0);
}

TEST_CASE("a duplicated frame is rejected once and the stream continues") {
  const ImuTrace trace = walk_trace(500);
  auto ends = make_inproc_pair();
  auto& a = ends.first;
  auto& b = ends.second;
  // send 0 is the hello, so send 251 carries sample 250.
  FaultInjectingTransport faulty(std::move(a), 251);
  const StreamResult r = stream_session(trace, faulty, *b);
  CHECK(r.ok());
  CHECK(r.replay_rejections == 1);
  CHECK(bitwise_equal(r.delivered, trace));
  CHECK(faulty.sends() == trace.size() + 2);
}

TEST_CASE("transport failure returns the partial trace with the error") {
  const ImuTrace trace = walk_trace(300);
  auto ends = make_inproc_pair();
  auto& a = ends.first;
  auto& b = ends.second;
  BreakingTransport breaking(*a, 101);  // hello plus 100 frames get through
  const StreamResult r = stream_session(trace, breaking, *b);
  REQUIRE_FALSE(r.ok());
  CHECK(r.error->kind() == LinkError::Kind::kTransport);
  REQUIRE(r.delivered.size() == 100);
  CHECK(bitwise_equal(r.delivered, ImuTrace(trace.begin(), trace.begin() + 100)));
}

TEST_CASE("off-grid samples are refused before sending") {
  ImuTrace trace = walk_trace(5);
  trace[3].accel.x = 1e9;
  auto ends = make_inproc_pair();
  auto& a = ends.first;
  auto& b = ends.second;
  const StreamResult r = stream_session(trace, *a, *b);
  CHECK_FALSE(r.ok());
  CHECK(r.delivered.size() == 3);
}
