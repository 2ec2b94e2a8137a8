#include "airloc/secure_link/transport.hpp"

#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>

#include "airloc/secure_link/wire.hpp"

namespace airloc::link {

namespace {

// One direction of the in-process pipe.
struct Channel {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::uint8_t> bytes;
  bool closed = false;
};

class InProcTransport final : public Transport {
 public:
  InProcTransport(std::shared_ptr<Channel> out, std::shared_ptr<Channel> in)
      : out_(std::move(out)), in_(std::move(in)) {}
  ~InProcTransport() override { close(); }

  void send(std::span<const std::uint8_t> bytes) override {
    {
      std::lock_guard lock(out_->mu);
      if (out_->closed) throw LinkError(LinkError::Kind::kClosed, "send on a closed in-process transport");
      out_->bytes.insert(out_->bytes.end(), bytes.begin(), bytes.end());
    }
    out_->cv.notify_all();
  }

  std::vector<std::uint8_t> receive_exact(std::size_t n, std::chrono::milliseconds timeout) override {
    std::unique_lock lock(in_->mu);
    const bool ready = in_->cv.wait_for(lock, timeout, [&] { return in_->bytes.size() >= n || in_->closed; });
    if (in_->bytes.size() < n) {
      if (!ready) throw LinkError(LinkError::Kind::kTimeout, "receive timed out");
      throw LinkError(LinkError::Kind::kClosed, "peer closed the in-process transport");
    }
    std::vector<std::uint8_t> out(in_->bytes.begin(), in_->bytes.begin() + static_cast<std::ptrdiff_t>(n));
    in_->bytes.erase(in_->bytes.begin(), in_->bytes.begin() + static_cast<std::ptrdiff_t>(n));
    return out;
  }

  void close() override {
    for (const auto& ch : {out_, in_}) {
      {
        std::lock_guard lock(ch->mu);
        ch->closed = true;
      }
      ch->cv.notify_all();
    }
  }

 private:
  std::shared_ptr<Channel> out_;
  std::shared_ptr<Channel> in_;
};

class SocketTransport final : public Transport {
 public:
  explicit SocketTransport(int fd) : fd_(fd) {}
  ~SocketTransport() override {
    if (fd_ >= 0) ::close(fd_);
  }

  void send(std::span<const std::uint8_t> bytes) override {
    std::lock_guard lock(mu_);
    if (closed_) throw LinkError(LinkError::Kind::kClosed, "send on a closed socket transport");
    std::size_t done = 0;
    while (done < bytes.size()) {
      const ssize_t k = ::send(fd_, bytes.data() + done, bytes.size() - done, MSG_NOSIGNAL);
      if (k < 0) {
        if (errno == EINTR) continue;
        if (errno == EPIPE || errno == ECONNRESET) throw LinkError(LinkError::Kind::kClosed, "peer closed the socket");
        throw LinkError(LinkError::Kind::kTransport, std::string("socket send failed: ") + std::strerror(errno));
      }
      done += static_cast<std::size_t>(k);
    }
  }

  std::vector<std::uint8_t> receive_exact(std::size_t n, std::chrono::milliseconds timeout) override {
    std::vector<std::uint8_t> out(n);
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    std::size_t done = 0;
    while (done < n) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) throw LinkError(LinkError::Kind::kTimeout, "receive timed out");
      pollfd p{fd_, POLLIN, 0};
      const int r = ::poll(&p, 1, static_cast<int>(std::min<std::int64_t>(left.count(), 1 << 30)));
      if (r < 0) {
        if (errno == EINTR) continue;
        throw LinkError(LinkError::Kind::kTransport, std::string("poll failed: ") + std::strerror(errno));
      }
      if (r == 0) continue;
      const ssize_t k = ::recv(fd_, out.data() + done, n - done, 0);
      if (k == 0) throw LinkError(LinkError::Kind::kClosed, "peer closed the socket");
      if (k < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        if (errno == ECONNRESET) throw LinkError(LinkError::Kind::kClosed, "peer closed the socket");
        throw LinkError(LinkError::Kind::kTransport, std::string("socket receive failed: ") + std::strerror(errno));
      }
      done += static_cast<std::size_t>(k);
    }
    return out;
  }

  void close() override {
    std::lock_guard lock(mu_);
    if (closed_) return;
    closed_ = true;
    ::shutdown(fd_, SHUT_RDWR);
  }

 private:
  int fd_;
  std::mutex mu_;
  bool closed_ = false;
};

}  // namespace

TransportPair make_inproc_pair() {
  auto a_to_b = std::make_shared<Channel>();
  auto b_to_a = std::make_shared<Channel>();
  return {std::make_unique<InProcTransport>(a_to_b, b_to_a), std::make_unique<InProcTransport>(b_to_a, a_to_b)};
}

TransportPair make_socket_pair() {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0) {
    throw LinkError(LinkError::Kind::kTransport, std::string("socketpair failed: ") + std::strerror(errno));
  }
  return {std::make_unique<SocketTransport>(fds[0]), std::make_unique<SocketTransport>(fds[1])};
}

void FaultInjectingTransport::send(std::span<const std::uint8_t> bytes) {
  inner_->send(bytes);
  if (sends_++ == duplicate_index_) inner_->send(bytes);
}

}  // namespace airloc::link
