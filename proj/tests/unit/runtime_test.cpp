#include <gtest/gtest.h>

#include <numeric>
#include <set>

#include "choreo/runtime.hpp"
#include "choreo/sim_net.hpp"

using namespace choreo;

namespace {

using Unit = std::monostate;

// Ping-pong over a chain with per-endpoint randomness, an enclave and a
// branch: enough structure to compare interpreters.
Choreography<Unit, std::tuple<Located<std::int64_t>, Faceted<std::int64_t>>> sample() {
  return {census_of({"a", "b", "c", "idle"}), [](ChoreoOp& op, const Unit&) {
            auto a = op.member("a");
            auto b = op.member("b");
            auto draw = op.locally(a, [](const Unwrapper& un) { return static_cast<std::int64_t>(un.rng()() % 100); });
            auto at_b = op.comm(a, b, draw);
            auto inner = op.enclave(op.subset({"a", "b", "c"}), [&](ChoreoOp& in) {
              auto x = in.broadcast(in.member("b"), at_b);
              in.branch("parity", x % 2 == 0 ? "even" : "odd");
              return x * 2;
            });
            auto noise = op.parallel(op.subset({"a", "b", "c"}), [](const MembershipWitness&, const Unwrapper& un) {
              return static_cast<std::int64_t>(un.rng()() % 1000);
            });
            auto c = census_of({"c"});
            auto at_c = op.others_forget(subset(c, inner.owners()), inner);
            return std::tuple(at_c, noise);
          }};
}

}  // namespace

TEST(Runtime, CentralizedIsDeterministic) {
  auto c = sample();
  auto r1 = run_centralized(c, Unit{}, 4);
  auto r2 = run_centralized(c, Unit{}, 4);
  EXPECT_EQ(r1.to_text(), r2.to_text());
  for (const auto& n : r1.census) EXPECT_EQ(r1.endpoints[n].result, r2.endpoints[n].result);
}

TEST(Runtime, SimulatedIsDeterministic) {
  auto c = sample();
  auto r1 = run_simulated(c, Unit{}, 9);
  auto r2 = run_simulated(c, Unit{}, 9);
  EXPECT_EQ(r1.messages, r2.messages);
  EXPECT_EQ(r1.branches, r2.branches);
  EXPECT_EQ(r1.steps, r2.steps);
}

TEST(Runtime, SimulatedMatchesCentralizedAcrossSeeds) {
  auto c = sample();
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto central = run_centralized(c, Unit{}, seed);
    auto sim = run_simulated(c, Unit{}, seed);
    ASSERT_TRUE(sim.ok());
    for (const auto& n : central.census) {
      EXPECT_EQ(central.endpoints[n].result, sim.endpoints[n].result) << n << " seed " << seed;
      EXPECT_EQ(central.branch_log(n), sim.branch_log(n));
    }
    EXPECT_EQ(central.message_count(), sim.message_count());
    EXPECT_TRUE(branch_disagreements(sim).empty());
    EXPECT_TRUE(agreement_violations(sim).empty());
  }
}

TEST(Runtime, ProjectionErasure) {
  auto r = run_simulated(sample(), Unit{}, 1);
  MessageFilter idle_send, idle_recv;
  idle_send.sender = "idle";
  idle_recv.receiver = "idle";
  EXPECT_EQ(sim_message_count(r.messages, idle_send), 0u);
  EXPECT_EQ(sim_message_count(r.messages, idle_recv), 0u);
  auto absent = Value::variant(0, Value::unit());
  EXPECT_EQ(*r.endpoints["idle"].result, Value::sequence({absent, absent}));
  EXPECT_TRUE(r.branch_log("idle").empty());
}

TEST(Runtime, SingletonCensusHasNoMessages) {
  Choreography<std::int64_t, std::int64_t> square{census_of({"solo"}),
                                                  [](ChoreoOp&, const std::int64_t& x) { return x * x; }};
  auto r = run_centralized(square, std::int64_t{12}, 0);
  EXPECT_EQ(*r.endpoints["solo"].result, Value::integer(144));
  EXPECT_EQ(r.message_count(), 0u);
}

TEST(Runtime, ProjectRejectsOutsider) {
  Choreography<Unit, Unit> c{census_of({"a"}), [](ChoreoOp&, const Unit&) { return Unit{}; }};
  SimNet net(census_of({"a", "z"}), 0);
  try {
    project_and_run(c, Location("z"), net.handle(Location("z")), Unit{}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPreconditionFailed);
  }
}

TEST(Runtime, ReceiverWithoutSenderIsFlagged) {
  // b expects a value a never sends: each endpoint disagrees on the plan.
  Choreography<Unit, Unit> broken{census_of({"a", "b"}), [](ChoreoOp& op, const Unit&) {
                                    auto a = op.member("a");
                                    auto b = op.member("b");
                                    bool at_b = LocatedAccess::payload(op.locally(b, [](const Unwrapper&) { return true; }))
                                                    .value_or(false);
                                    if (at_b) op.comm(a, b, op.locally(a, [](const Unwrapper&) { return true; }));
                                    return Unit{};
                                  }};
  auto r = run_simulated(broken, Unit{}, 3);
  EXPECT_FALSE(r.ok());
  EXPECT_FALSE(r.endpoints_with(ErrorCode::kStepBudgetExceeded).empty());
}

TEST(Runtime, StepBudgetIsEnforced) {
  auto r = run_simulated(sample(), Unit{}, 0, SimOptions{1});
  EXPECT_FALSE(r.ok());
  EXPECT_FALSE(r.endpoints_with(ErrorCode::kStepBudgetExceeded).empty());
}

TEST(Runtime, ErrorAtOneEndpointAbortsOthers) {
  Choreography<Unit, Located<bool>> c{census_of({"a", "b"}), [](ChoreoOp& op, const Unit&) {
                                        auto a = op.member("a");
                                        auto v = op.locally(a, [](const Unwrapper&) -> bool {
                                          throw Error(ErrorCode::kCommitmentFailed, "check failed");
                                        });
                                        return op.comm(a, op.member("b"), v);
                                      }};
  auto r = run_simulated(c, Unit{}, 0);
  EXPECT_EQ(r.endpoints_with(ErrorCode::kCommitmentFailed), (std::vector<std::string>{"a"}));
  EXPECT_EQ(r.endpoints_with(ErrorCode::kPeerAborted), (std::vector<std::string>{"b"}));
}

TEST(RunReport, TextFormat) {
  auto r = run_centralized(sample(), Unit{}, 2);
  auto text = r.to_text();
  EXPECT_NE(text.find("MSG a b "), std::string::npos);
  EXPECT_NE(text.find("BRANCH a parity@"), std::string::npos);
}

TEST(SimNet, PerPairFifo) {
  auto census = census_of({"s", "r"});
  SimNet net(census, 11);
  std::vector<std::int64_t> got;
  net.execute({[&] {
                 for (std::int64_t i = 0; i < 20; ++i) net.handle(Location("s")).send(Location("r"), encode(i));
               },
               [&] {
                 for (int i = 0; i < 20; ++i) got.push_back(decode<std::int64_t>(net.handle(Location("r")).recv(Location("s"))));
               }},
              1000);
  std::vector<std::int64_t> expected(20);
  std::iota(expected.begin(), expected.end(), 0);
  EXPECT_EQ(got, expected);
  for (std::size_t i = 0; i < net.log().size(); ++i) EXPECT_EQ(net.log()[i].seq, i);
}

TEST(SimNet, CrossPairOrderVariesWithSeed) {
  auto census = census_of({"x", "y", "r"});
  std::set<std::string> first_sent;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    SimNet net(census, seed);
    net.execute({[&] { net.handle(Location("x")).send(Location("r"), encode(true)); },
                 [&] { net.handle(Location("y")).send(Location("r"), encode(true)); },
                 [&] {
                   net.handle(Location("r")).recv(Location("x"));
                   net.handle(Location("r")).recv(Location("y"));
                 }},
                1000);
    first_sent.insert(net.log().front().sender);
  }
  EXPECT_EQ(first_sent.size(), 2u);
}

TEST(SimNet, SameSeedSameSchedule) {
  auto census = census_of({"x", "y", "r"});
  auto run = [&](std::uint64_t seed) {
    SimNet net(census, seed);
    net.execute({[&] { net.handle(Location("x")).send(Location("r"), encode(true)); },
                 [&] { net.handle(Location("y")).send(Location("r"), encode(false)); },
                 [&] {
                   net.handle(Location("r")).recv(Location("y"));
                   net.handle(Location("r")).recv(Location("x"));
                 }},
                1000);
    return net.log();
  };
  EXPECT_EQ(run(5), run(5));
}

TEST(SimNet, EmptyLogCountsZero) { EXPECT_EQ(sim_message_count({}), 0u); }
