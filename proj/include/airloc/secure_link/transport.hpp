#pragma once

// Ordered, reliable duplex byte streams between the two link endpoints.

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace airloc::link {

class Transport {
 public:
  virtual ~Transport() = default;

  // Throws LinkError(kClosed) after close() on either end, kTransport on
  // other failures.
  virtual void send(std::span<const std::uint8_t> bytes) = 0;
  // Blocks until exactly n octets arrived.  Throws LinkError(kTimeout) when
  // the deadline passes and kClosed when the peer closed before n octets.
  virtual std::vector<std::uint8_t> receive_exact(std::size_t n, std::chrono::milliseconds timeout) = 0;
  // Idempotent.  The peer sees end-of-stream once buffered data is drained.
  virtual void close() = 0;
};

using TransportPair = std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>>;

// Two in-process endpoints joined by mutex/condition-variable queues.
TransportPair make_inproc_pair();

// Two ends of a local socketpair(AF_UNIX, SOCK_STREAM).
TransportPair make_socket_pair();

// Test harness: forwards everything to `inner` but transmits the send() call
// with the given 0-based index twice in a row.
class FaultInjectingTransport final : public Transport {
 public:
  FaultInjectingTransport(std::unique_ptr<Transport> inner, std::size_t duplicate_send_index)
      : inner_(std::move(inner)), duplicate_index_(duplicate_send_index) {}

  void send(std::span<const std::uint8_t> bytes) override;
  std::vector<std::uint8_t> receive_exact(std::size_t n, std::chrono::milliseconds timeout) override {
    return inner_->receive_exact(n, timeout);
  }
  void close() override { inner_->close(); }

  std::size_t sends() const { return sends_; }

 private:
  std::unique_ptr<Transport> inner_;
  std::size_t duplicate_index_;
  std::size_t sends_ = 0;
};

}  // namespace airloc::link
