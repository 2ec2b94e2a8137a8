#include "airloc/secure_link/stream.hpp"

#include <thread>

namespace airloc::link {

namespace {

LinkError as_link_error(std::exception_ptr ep) {
  try {
    std::rethrow_exception(ep);
  } catch (const LinkError& e) {
    return e;
  } catch (const TraceError& e) {
    return LinkError(LinkError::Kind::kMalformed, std::string("source sample rejected: ") + e.what());
  } catch (const std::exception& e) {
    return LinkError(LinkError::Kind::kTransport, e.what());
  }
}

}  // namespace

StreamResult stream_session(const ImuTrace& source, Transport& device_end, Transport& phone_end,
                            const StreamOptions& options) {
  fourq::SystemEntropy system_entropy;
  fourq::EntropySource& device_entropy = options.device_entropy ? *options.device_entropy : system_entropy;
  fourq::EntropySource& phone_entropy = options.phone_entropy ? *options.phone_entropy : system_entropy;

  StreamResult result;
  std::optional<LinkError> device_error;

  std::thread device([&] {
    try {
      Session s = device_handshake(device_end, device_entropy, options.timeout);
      for (const ImuSample& sample : source) {
        const SensorPayload payload = to_payload(sample);
        device_end.send(encode_frame(s.seal(payload)));
        ++result.frames_sent;
      }
      device_end.send(encode_frame(s.seal_end_of_stream()));
    } catch (...) {
      device_error = as_link_error(std::current_exception());
      device_end.close();
    }
  });

  std::optional<LinkError> phone_error;
  try {
    Session s = phone_handshake(phone_end, phone_entropy, options.timeout);
    result.salt = s.salt();
    for (;;) {
      const Frame f = receive_frame(phone_end, options.timeout);
      std::optional<SensorPayload> p;
      try {
        p = s.open(f);
      } catch (const LinkError& e) {
        if (e.kind() != LinkError::Kind::kReplay) throw;
        ++result.replay_rejections;
        continue;
      }
      if (!p) break;
      result.delivered.push_back(to_sample(*p));
    }
  } catch (...) {
    phone_error = as_link_error(std::current_exception());
  }
  phone_end.close();
  device.join();
  device_end.close();

  // A failure on one side usually surfaces on the other as kClosed; report
  // the originating one.
  if (phone_error && device_error) {
    result.error = phone_error->kind() == LinkError::Kind::kClosed ? device_error : phone_error;
  } else if (phone_error) {
    result.error = phone_error;
  } else if (device_error) {
    result.error = device_error;
  }
  return result;
}

}  // namespace airloc::link
