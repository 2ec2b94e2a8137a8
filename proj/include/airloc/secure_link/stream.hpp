#pragma once

// Device -> phone telemetry over a fresh session.

#include <optional>

#include "airloc/imu.hpp"
#include "airloc/secure_link/session.hpp"

namespace airloc::link {

struct StreamOptions {
  // nullptr selects the system CSPRNG.
  fourq::EntropySource* device_entropy = nullptr;
  fourq::EntropySource* phone_entropy = nullptr;
  std::chrono::milliseconds timeout = kDefaultTimeout;
};

struct StreamResult {
  ImuTrace delivered;
  std::size_t frames_sent = 0;  // data frames, end-of-stream excluded
  std::size_t replay_rejections = 0;
  Salt salt{};
  std::optional<LinkError> error;  // set when the session ended abnormally

  bool ok() const { return !error.has_value(); }
};

// Handshake, then one frame per sample and an end-of-stream frame.  The
// device endpoint runs on its own thread, the phone endpoint on the caller's.
// Replayed frames are counted and skipped.  On any other failure both ends
// are closed and the samples delivered so far are returned with the error.
// Samples travel on the device grid: delivered == source bitwise when the
// source is already quantized (device_grid::quantize).
StreamResult stream_session(const ImuTrace& source, Transport& device_end, Transport& phone_end,
                            const StreamOptions& options = {});

}  // namespace airloc::link
