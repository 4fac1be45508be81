#include "choreo/tcp_transport.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace choreo {
namespace {

std::pair<std::string, std::string> split_address(const std::string& address) {
  auto colon = address.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == address.size()) {
    throw Error(ErrorCode::kConfigError, "address '" + address + "' is not host:port");
  }
  return {address.substr(0, colon), address.substr(colon + 1)};
}

[[noreturn]] void io_failure(const std::string& what) {
  throw Error(ErrorCode::kTransportError, what + ": " + std::strerror(errno));
}

struct AddrInfo {
  addrinfo* list = nullptr;
  ~AddrInfo() {
    if (list) freeaddrinfo(list);
  }
};

AddrInfo resolve(const std::string& address, bool passive) {
  auto [host, port] = split_address(address);
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  AddrInfo info;
  int rc = getaddrinfo(host.c_str(), port.c_str(), &hints, &info.list);
  if (rc != 0) throw Error(ErrorCode::kTransportError, "cannot resolve " + address + ": " + gai_strerror(rc));
  return info;
}

void write_all(int fd, const std::uint8_t* data, std::size_t n) {
  while (n > 0) {
    auto written = ::send(fd, data, n, MSG_NOSIGNAL);
    if (written < 0) {
      if (errno == EINTR) continue;
      io_failure("send failed");
    }
    data += written;
    n -= static_cast<std::size_t>(written);
  }
}

// Returns false on a clean end-of-stream before the first byte.
bool read_exact(int fd, std::uint8_t* data, std::size_t n) {
  std::size_t got = 0;
  while (got < n) {
    auto r = ::recv(fd, data + got, n - got, 0);
    if (r == 0) {
      if (got == 0) return false;
      throw Error(ErrorCode::kDecodeError, "connection closed inside a frame");
    }
    if (r < 0) {
      if (errno == EINTR) continue;
      io_failure("recv failed");
    }
    got += static_cast<std::size_t>(r);
  }
  return true;
}

}  // namespace

Bytes encode_frame(const Envelope& e) {
  auto payload = encode_value(Value::pair(
      Value::text(e.sender),
      Value::pair(Value::integer(static_cast<std::int64_t>(e.seq)),
                  Value::text(std::string(e.body.begin(), e.body.end())))));
  if (payload.size() > kMaxFrameBytes) throw Error(ErrorCode::kEncodingError, "frame exceeds 64 MiB");
  Bytes frame;
  frame.reserve(payload.size() + 4);
  auto n = static_cast<std::uint32_t>(payload.size());
  for (int shift = 24; shift >= 0; shift -= 8) frame.push_back(static_cast<std::uint8_t>(n >> shift));
  frame.insert(frame.end(), payload.begin(), payload.end());
  return frame;
}

std::uint32_t decode_frame_length(const std::array<std::uint8_t, 4>& prefix) {
  std::uint32_t n = 0;
  for (auto b : prefix) n = (n << 8) | b;
  if (n > kMaxFrameBytes) {
    throw Error(ErrorCode::kDecodeError, "frame length " + std::to_string(n) + " exceeds 64 MiB");
  }
  return n;
}

Envelope decode_frame_payload(std::span<const std::uint8_t> payload) {
  auto v = decode_value(payload);
  try {
    const auto& body = v.second().second().as_text();
    return Envelope{v.first().as_text(), static_cast<std::uint64_t>(v.second().first().as_int()),
                    Bytes(body.begin(), body.end())};
  } catch (const Error& e) {
    throw Error(ErrorCode::kDecodeError, std::string("malformed envelope: ") + e.what());
  }
}

TcpTransport::TcpTransport(Location self, AddressBook book, TcpOptions options)
    : self_(std::move(self)), options_(options), book_(std::move(book)) {
  auto it = book_.find(self_.name());
  if (it == book_.end()) throw Error(ErrorCode::kConfigError, "no address for " + self_.name());
  auto info = resolve(it->second, true);
  listen_fd_ = ::socket(info.list->ai_family, info.list->ai_socktype, info.list->ai_protocol);
  if (listen_fd_ < 0) io_failure("socket failed");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(listen_fd_, info.list->ai_addr, info.list->ai_addrlen) != 0) {
    ::close(listen_fd_);
    io_failure("bind " + it->second + " failed");
  }
  if (::listen(listen_fd_, 64) != 0) {
    ::close(listen_fd_);
    io_failure("listen failed");
  }
  sockaddr_in bound{};
  socklen_t len = sizeof bound;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  bound_port_ = ntohs(bound.sin_port);
  acceptor_ = std::thread([this] { accept_loop(); });
}

TcpTransport::~TcpTransport() { close(); }

void TcpTransport::set_peer_address(const std::string& name, const std::string& address) {
  std::lock_guard lock(mutex_);
  book_[name] = address;
}

void TcpTransport::close() {
  {
    std::lock_guard lock(mutex_);
    if (closed_) return;
    closed_ = true;
  }
  arrived_.notify_all();
  ::shutdown(listen_fd_, SHUT_RDWR);
  if (acceptor_.joinable()) acceptor_.join();
  ::close(listen_fd_);
  {
    std::lock_guard lock(mutex_);
    for (int fd : incoming_fds_) ::shutdown(fd, SHUT_RDWR);
  }
  for (auto& t : readers_) {
    if (t.joinable()) t.join();
  }
  for (int fd : incoming_fds_) ::close(fd);
  for (auto& [name, fd] : outgoing_) ::close(fd);
  outgoing_.clear();
}

void TcpTransport::accept_loop() {
  for (;;) {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    std::lock_guard lock(mutex_);
    if (closed_) {
      if (fd >= 0) ::close(fd);
      return;
    }
    if (fd < 0) {
      if (errno == EINTR || errno == ECONNABORTED) continue;
      return;
    }
    incoming_fds_.push_back(fd);
    readers_.emplace_back([this, fd] { read_loop(fd); });
  }
}

void TcpTransport::read_loop(int fd) {
  std::optional<std::string> peer;
  std::uint64_t expected_seq = 0;
  try {
    for (;;) {
      std::array<std::uint8_t, 4> prefix{};
      if (!read_exact(fd, prefix.data(), prefix.size())) return;
      Bytes payload(decode_frame_length(prefix));
      if (!read_exact(fd, payload.data(), payload.size())) {
        throw Error(ErrorCode::kDecodeError, "connection closed before frame payload");
      }
      auto env = decode_frame_payload(payload);
      if (!peer) {
        std::lock_guard lock(mutex_);
        if (!book_.count(env.sender)) {
          throw Error(ErrorCode::kTransportError, "envelope from unknown sender '" + env.sender + "'");
        }
        peer = env.sender;
      } else if (*peer != env.sender) {
        throw Error(ErrorCode::kTransportError, "connection from " + *peer + " carried an envelope from " + env.sender);
      }
      if (env.seq != expected_seq) {
        throw Error(ErrorCode::kTransportError, "sequence gap from " + env.sender + ": expected " +
                                                    std::to_string(expected_seq) + ", got " + std::to_string(env.seq));
      }
      ++expected_seq;
      {
        std::lock_guard lock(mutex_);
        inbox_[env.sender].push_back(std::move(env));
      }
      arrived_.notify_all();
    }
  } catch (...) {
    std::lock_guard lock(mutex_);
    if (closed_) return;
    if (!failure_) failure_ = std::current_exception();
    arrived_.notify_all();
  }
}

void TcpTransport::send(const Location& to, Bytes body) {
  int fd = -1;
  std::uint64_t seq = 0;
  std::string address;
  {
    std::lock_guard lock(mutex_);
    if (closed_) throw Error(ErrorCode::kTransportError, "transport closed");
    auto it = book_.find(to.name());
    if (it == book_.end()) throw Error(ErrorCode::kConfigError, "no address for " + to.name());
    address = it->second;
    auto out = outgoing_.find(to.name());
    if (out != outgoing_.end()) fd = out->second;
    seq = next_send_seq_[to.name()]++;
  }
  if (fd < 0) {
    auto deadline = std::chrono::steady_clock::now() + options_.connect_timeout;
    // Peers of a multi-process run start at different times, so the first
    // connection attempt is retried until the deadline.
    for (;;) {
      auto info = resolve(address, false);
      fd = ::socket(info.list->ai_family, info.list->ai_socktype, info.list->ai_protocol);
      if (fd < 0) io_failure("socket failed");
      if (::connect(fd, info.list->ai_addr, info.list->ai_addrlen) == 0) break;
      ::close(fd);
      fd = -1;
      if (std::chrono::steady_clock::now() >= deadline) io_failure("connect to " + to.name() + " at " + address);
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    std::lock_guard lock(mutex_);
    outgoing_[to.name()] = fd;
  }
  auto frame = encode_frame(Envelope{self_.name(), seq, std::move(body)});
  write_all(fd, frame.data(), frame.size());
}

Bytes TcpTransport::recv(const Location& from) {
  std::unique_lock lock(mutex_);
  auto& queue = inbox_[from.name()];
  arrived_.wait_for(lock, options_.recv_timeout, [&] { return !queue.empty() || failure_ || closed_; });
  if (!queue.empty()) {
    auto env = std::move(queue.front());
    queue.pop_front();
    auto expected = next_recv_seq_[from.name()]++;
    if (env.seq != expected) throw Error(ErrorCode::kTransportError, "out-of-order envelope from " + from.name());
    return std::move(env.body);
  }
  if (failure_) std::rethrow_exception(failure_);
  if (closed_) throw Error(ErrorCode::kTransportError, "transport closed");
  throw Error(ErrorCode::kTransportError, "timed out waiting for a message from " + from.name());
}

std::uint64_t TcpTransport::tick() { return ++clock_; }

}  // namespace choreo
