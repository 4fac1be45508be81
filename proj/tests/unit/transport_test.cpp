#include <gtest/gtest.h>

#include <thread>

#include "choreo/runtime.hpp"
#include "choreo/tcp_transport.hpp"

using namespace choreo;

namespace {

// Two transports on ephemeral loopback ports wired to each other.
struct Pair {
  TcpTransport a{Location("a"), {{"a", "127.0.0.1:0"}, {"b", "127.0.0.1:1"}}};
  TcpTransport b{Location("b"), {{"a", "127.0.0.1:1"}, {"b", "127.0.0.1:0"}}};
  Pair() {
    a.set_peer_address("b", "127.0.0.1:" + std::to_string(b.bound_port()));
    b.set_peer_address("a", "127.0.0.1:" + std::to_string(a.bound_port()));
  }
};

}  // namespace

TEST(Frame, RoundTrip) {
  Envelope e{"alice", 3, Bytes{0, 1, 2, 255}};
  auto frame = encode_frame(e);
  ASSERT_GE(frame.size(), 4u);
  std::array<std::uint8_t, 4> prefix{frame[0], frame[1], frame[2], frame[3]};
  auto length = decode_frame_length(prefix);
  EXPECT_EQ(length, frame.size() - 4);
  EXPECT_EQ(decode_frame_payload(std::span(frame).subspan(4)), e);
}

TEST(Frame, RejectsOversizedLength) {
  try {
    decode_frame_length({0x04, 0x00, 0x00, 0x01});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDecodeError);
  }
  EXPECT_EQ(decode_frame_length({0x04, 0x00, 0x00, 0x00}), kMaxFrameBytes);
}

TEST(Frame, RejectsMalformedPayload) {
  Bytes junk{6, 0, 0, 0, 9};
  EXPECT_THROW(decode_frame_payload(junk), Error);
}

TEST(Tcp, LoopbackEcho) {
  Pair p;
  Bytes body{1, 2, 3, 0, 250};
  p.a.send(Location("b"), body);
  auto got = p.b.recv(Location("a"));
  EXPECT_EQ(got, body);
  p.b.send(Location("a"), got);
  EXPECT_EQ(p.a.recv(Location("b")), body);
  p.a.close();
  p.b.close();
}

TEST(Tcp, FifoPerPair) {
  Pair p;
  std::thread sender([&] {
    for (std::int64_t i = 0; i < 200; ++i) p.a.send(Location("b"), encode(i));
  });
  for (std::int64_t i = 0; i < 200; ++i) EXPECT_EQ(decode<std::int64_t>(p.b.recv(Location("a"))), i);
  sender.join();
  p.a.close();
  p.b.close();
}

TEST(Tcp, ChoreographyMatchesSimulator) {
  Choreography<std::monostate, Located<std::int64_t>> c{
      census_of({"a", "b"}), [](ChoreoOp& op, const std::monostate&) {
        auto a = op.member("a");
        auto b = op.member("b");
        auto x = op.comm(a, b, op.locally(a, [](const Unwrapper& un) { return static_cast<std::int64_t>(un.rng()() % 50); }));
        auto y = op.locally(b, [&](const Unwrapper& un) { return un.unwrap(x) + 1; });
        return op.comm(b, a, y);
      }};
  auto sim = run_simulated(c, std::monostate{}, 6);
  Pair p;
  RunReport at_b;
  std::thread tb([&] {
    at_b = detail::run_endpoint_erased(c.census, detail::erase(c, std::monostate{}), Location("b"), p.b, 6);
  });
  auto at_a = detail::run_endpoint_erased(c.census, detail::erase(c, std::monostate{}), Location("a"), p.a, 6);
  tb.join();
  ASSERT_TRUE(at_a.ok());
  ASSERT_TRUE(at_b.ok());
  EXPECT_EQ(at_a.endpoints["a"].result, sim.endpoints["a"].result);
  EXPECT_EQ(at_b.endpoints["b"].result, sim.endpoints["b"].result);
  p.a.close();
  p.b.close();
}

TEST(Tcp, ConnectFailureIsTransportError) {
  TcpTransport a{Location("a"), {{"a", "127.0.0.1:0"}, {"b", "127.0.0.1:1"}},
                 TcpOptions{std::chrono::milliseconds(300), std::chrono::milliseconds(300)}};
  try {
    a.send(Location("b"), Bytes{1});
    a.recv(Location("b"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTransportError);
  }
  a.close();
}
