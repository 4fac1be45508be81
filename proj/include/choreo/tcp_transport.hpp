#pragma once

#include <array>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "choreo/transport.hpp"

namespace choreo {

/// location name -> "host:port"
using AddressBook = std::map<std::string, std::string>;

inline constexpr std::uint32_t kMaxFrameBytes = 64u * 1024u * 1024u;

struct Envelope {
  std::string sender;
  std::uint64_t seq = 0;
  Bytes body;

  friend bool operator==(const Envelope&, const Envelope&) = default;
};

/// Frame = 4-byte big-endian payload length, then the portable encoding of
/// (sender, (seq, body)) where body travels as a text value.
Bytes encode_frame(const Envelope& e);
/// Validates a length prefix; throws DecodeError above kMaxFrameBytes.
std::uint32_t decode_frame_length(const std::array<std::uint8_t, 4>& prefix);
Envelope decode_frame_payload(std::span<const std::uint8_t> payload);

struct TcpOptions {
  std::chrono::milliseconds connect_timeout{10000};
  std::chrono::milliseconds recv_timeout{30000};
};

/// One listening socket per endpoint plus one outgoing connection per peer,
/// opened lazily on first send. Incoming connections are read by background
/// threads that demultiplex envelopes into per-sender FIFO queues.
class TcpTransport : public Transport {
 public:
  /// Binds `book.at(self)` immediately; port 0 picks an ephemeral port.
  TcpTransport(Location self, AddressBook book, TcpOptions options = {});
  ~TcpTransport() override;
  TcpTransport(const TcpTransport&) = delete;
  TcpTransport& operator=(const TcpTransport&) = delete;

  void send(const Location& to, Bytes body) override;
  Bytes recv(const Location& from) override;
  std::uint64_t tick() override;

  std::uint16_t bound_port() const noexcept { return bound_port_; }
  void set_peer_address(const std::string& name, const std::string& address);
  void close();

 private:
  void accept_loop();
  void read_loop(int fd);
  void fail(std::exception_ptr e);

  Location self_;
  TcpOptions options_;
  std::mutex mutex_;
  std::condition_variable arrived_;
  AddressBook book_;
  int listen_fd_ = -1;
  std::uint16_t bound_port_ = 0;
  std::map<std::string, int> outgoing_;
  std::map<std::string, std::uint64_t> next_send_seq_;
  std::map<std::string, std::uint64_t> next_recv_seq_;
  std::map<std::string, std::deque<Envelope>> inbox_;
  std::vector<int> incoming_fds_;
  std::vector<std::thread> readers_;
  std::thread acceptor_;
  std::exception_ptr failure_;
  std::uint64_t clock_ = 0;
  bool closed_ = false;
};

}  // namespace choreo
