#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "choreo/location.hpp"
#include "choreo/portable.hpp"

namespace choreo {

/// Point-to-point delivery contract shared by every transport: sends are
/// buffered and never block; `recv` blocks for the next in-order message from
/// one named sender. Delivery is FIFO per ordered pair with no loss and no
/// duplication; failures surface as TransportError.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send(const Location& to, Bytes body) = 0;
  virtual Bytes recv(const Location& from) = 0;
  /// Logical timestamp for event logs. Monotone per transport handle.
  virtual std::uint64_t tick() = 0;
};

/// One delivered (or in-flight) envelope as seen by the accounting.
struct MessageEvent {
  std::string sender;
  std::string receiver;
  std::uint64_t seq = 0;
  std::size_t bytes = 0;
  std::uint64_t sent_at = 0;
  std::optional<std::uint64_t> received_at;

  friend bool operator==(const MessageEvent&, const MessageEvent&) = default;
};

/// Selects log entries. Unset fields match everything; the time window is
/// half-open on `sent_at`.
struct MessageFilter {
  std::optional<std::uint64_t> sent_from;
  std::optional<std::uint64_t> sent_before;
  std::optional<std::string> sender;
  std::optional<std::string> receiver;
  /// When non-empty, both endpoints of the message must be in this set.
  std::set<std::string> within;
};

std::size_t sim_message_count(const std::vector<MessageEvent>& log, const MessageFilter& filter = {});

}  // namespace choreo
