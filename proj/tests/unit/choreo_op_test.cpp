#include <gtest/gtest.h>

#include "choreo/runtime.hpp"

using namespace choreo;

namespace {

using Unit = std::monostate;

template <class Ret>
Choreography<Unit, Ret> chor(std::vector<std::string> names, std::function<Ret(ChoreoOp&)> body) {
  return {census_of(names), [body](ChoreoOp& op, const Unit&) { return body(op); }};
}

template <class Ret>
RunReport central(std::vector<std::string> names, std::function<Ret(ChoreoOp&)> body, std::uint64_t seed = 0) {
  return run_centralized(chor<Ret>(std::move(names), std::move(body)), Unit{}, seed);
}

template <class Ret>
RunReport simulated(std::vector<std::string> names, std::function<Ret(ChoreoOp&)> body, std::uint64_t seed = 0) {
  return run_simulated(chor<Ret>(std::move(names), std::move(body)), Unit{}, seed);
}

Value present(Value v) { return Value::variant(1, std::move(v)); }
Value absent() { return Value::variant(0, Value::unit()); }

const std::vector<std::string> kThree{"client", "primary", "backup"};

}  // namespace

TEST(Locally, RunsOnlyAtOwner) {
  auto r = central<Located<std::int64_t>>(kThree, [](ChoreoOp& op) {
    return op.locally(op.member("primary"), [](const Unwrapper&) { return std::int64_t{7}; });
  });
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.message_count(), 0u);
  EXPECT_EQ(*r.endpoints["primary"].result, present(Value::integer(7)));
  EXPECT_EQ(*r.endpoints["client"].result, absent());
}

TEST(Locally, UnwrapAbsentAtNonOwner) {
  auto r = central<Located<std::int64_t>>(kThree, [](ChoreoOp& op) {
    auto at_backup = op.locally(op.member("backup"), [](const Unwrapper&) { return std::int64_t{1}; });
    return op.locally(op.member("primary"), [&](const Unwrapper& un) { return un.unwrap(at_backup); });
  });
  EXPECT_FALSE(r.endpoints_with(ErrorCode::kUnwrapAbsent).empty());
}

TEST(Multicast, SelfSendIsElided) {
  auto r = central<Located<std::int64_t>>(kThree, [](ChoreoOp& op) {
    auto p = op.member("primary");
    auto v = op.locally(p, [](const Unwrapper&) { return std::int64_t{3}; });
    return op.multicast(p, op.everyone(), v);
  });
  EXPECT_EQ(r.message_count(), 2u);
  for (const auto& n : kThree) EXPECT_EQ(*r.endpoints[n].result, present(Value::integer(3)));

  auto self_only = central<Located<std::int64_t>>(kThree, [](ChoreoOp& op) {
    auto p = op.member("primary");
    auto v = op.locally(p, [](const Unwrapper&) { return std::int64_t{3}; });
    return op.multicast(p, op.only(p), v);
  });
  EXPECT_EQ(self_only.message_count(), 0u);
}

TEST(Multicast, SenderMustOwn) {
  auto r = central<Located<std::int64_t>>(kThree, [](ChoreoOp& op) {
    auto v = op.locally(op.member("backup"), [](const Unwrapper&) { return std::int64_t{3}; });
    return op.comm(op.member("primary"), op.member("client"), v);
  });
  EXPECT_EQ(r.endpoints_with(ErrorCode::kNotAnOwner).size(), 3u);
}

TEST(Comm, OneMessage) {
  auto r = simulated<Located<std::string>>(kThree, [](ChoreoOp& op) {
    auto c = op.member("client");
    auto v = op.locally(c, [](const Unwrapper&) { return std::string("GET k"); });
    return op.comm(c, op.member("primary"), v);
  });
  ASSERT_TRUE(r.ok());
  ASSERT_EQ(r.message_count(), 1u);
  EXPECT_EQ(r.messages[0].sender, "client");
  EXPECT_EQ(r.messages[0].receiver, "primary");
}

TEST(Broadcast, CountsCensusMinusOne) {
  auto body = [](ChoreoOp& op) {
    auto p = op.member(op.census()[0].name());
    return op.broadcast(p, op.locally(p, [](const Unwrapper&) { return true; }));
  };
  EXPECT_EQ(central<bool>({"solo"}, body).message_count(), 0u);
  EXPECT_EQ(central<bool>({"primary", "backup"}, body).message_count(), 1u);
  auto three = simulated<bool>(kThree, body);
  EXPECT_EQ(three.message_count(), 2u);
  for (const auto& n : kThree) EXPECT_EQ(*three.endpoints[n].result, Value::boolean(true));
}

TEST(Naked, RequiresCensusOwnership) {
  auto r = central<std::int64_t>({"p", "q"}, [](ChoreoOp& op) {
    return op.naked(op.locally(op.member("p"), [](const Unwrapper&) { return std::int64_t{1}; }));
  });
  EXPECT_EQ(r.endpoints_with(ErrorCode::kCensusNotOwned).size(), 2u);
}

TEST(Enclave, OutsidersStaySilent) {
  auto r = simulated<Located<bool>>(kThree, [](ChoreoOp& op) {
    return op.enclave(op.subset({"primary", "backup"}), [](ChoreoOp& in) {
      auto p = in.member("primary");
      return in.broadcast(p, in.locally(p, [](const Unwrapper&) { return true; }));
    });
  });
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.message_count(), 1u);
  MessageFilter touching_client;
  touching_client.sender = "client";
  EXPECT_EQ(sim_message_count(r.messages, touching_client), 0u);
  EXPECT_EQ(*r.endpoints["client"].result, absent());
  EXPECT_EQ(*r.endpoints["backup"].result, present(Value::boolean(true)));
}

TEST(Enclave, SecondEnclaveReusesResultWithoutMessages) {
  auto r = simulated<Located<bool>>(kThree, [](ChoreoOp& op) {
    auto servers = op.subset({"primary", "backup"});
    auto first = op.enclave(servers, [](ChoreoOp& in) {
      auto b = in.member("backup");
      return in.broadcast(b, in.locally(b, [](const Unwrapper&) { return false; }));
    });
    return op.enclave(servers, [&](ChoreoOp& in) {
      bool failed = in.naked(first);
      in.branch("status", failed ? "error" : "ok");
      return !failed;
    });
  });
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.message_count(), 1u);
  EXPECT_EQ(r.branch_log("primary"), r.branch_log("backup"));
  EXPECT_TRUE(r.branch_log("client").empty());
}

TEST(Enclave, WholeCensusIsIdentity) {
  auto r = central<Located<std::int64_t>>({"p", "q"}, [](ChoreoOp& op) {
    return op.enclave(op.everyone(), [](ChoreoOp& in) { return static_cast<std::int64_t>(in.census().size()); });
  });
  EXPECT_EQ(*r.endpoints["p"].result, present(Value::integer(2)));
  EXPECT_EQ(*r.endpoints["q"].result, present(Value::integer(2)));
}

TEST(Replicated, AgreesAtAllOwners) {
  auto r = simulated<Located<std::int64_t>>(kThree, [](ChoreoOp& op) {
    return op.replicated([](const CongruentUnwrapper&) { return std::int64_t{42}; });
  });
  ASSERT_TRUE(r.ok());
  EXPECT_GT(r.agreement.size(), 0u);
  EXPECT_TRUE(agreement_violations(r).empty());
  for (const auto& n : kThree) EXPECT_EQ(*r.endpoints[n].result, present(Value::integer(42)));
}

TEST(Replicated, RejectsPartiallyOwnedValues) {
  auto r = central<Located<bool>>({"p", "q"}, [](ChoreoOp& op) {
    auto v = op.locally(op.member("p"), [](const Unwrapper&) { return true; });
    return op.replicated([&](const CongruentUnwrapper& cu) { return cu.unwrap(v); });
  });
  EXPECT_EQ(r.endpoints_with(ErrorCode::kUnwrapAbsent).size(), 2u);
}

TEST(Fanout, EmptyAndNonEmpty) {
  auto empty = central<Faceted<std::int64_t>>(kThree, [](ChoreoOp& op) {
    return op.fanout(Roster::none(op.census()), [](ChoreoOp& o, const MembershipWitness& q) {
      return o.locally(q, [](const Unwrapper&) { return std::int64_t{1}; });
    });
  });
  EXPECT_TRUE(empty.ok());
  EXPECT_EQ(*empty.endpoints["client"].result, absent());

  auto full = central<Faceted<std::int64_t>>(kThree, [](ChoreoOp& op) {
    return op.fanout(op.everyone(), [](ChoreoOp& o, const MembershipWitness& q) {
      return o.locally(q, [](const Unwrapper&) { return std::int64_t{5}; });
    });
  });
  for (const auto& n : kThree) EXPECT_EQ(*full.endpoints[n].result, present(Value::integer(5)));
}

TEST(Fanin, EmptyRosterGivesEmptyQuire) {
  auto r = central<Located<Quire<std::int64_t>>>(kThree, [](ChoreoOp& op) {
    return op.fanin(Roster::none(op.census()), op.only(op.member("primary")),
                    [](ChoreoOp& o, const MembershipWitness& q) {
                      return o.comm(q, o.member("primary"), o.locally(q, [](const Unwrapper&) { return std::int64_t{1}; }));
                    });
  });
  EXPECT_EQ(*r.endpoints["primary"].result, present(Value::sequence({})));
  EXPECT_EQ(r.message_count(), 0u);
}

TEST(Parallel, FacetsArePrivate) {
  auto r = simulated<Faceted<std::int64_t>>(kThree, [](ChoreoOp& op) {
    return op.parallel(op.everyone(), [](const MembershipWitness& q, const Unwrapper&) {
      return static_cast<std::int64_t>(q.index() * 10);
    });
  });
  EXPECT_EQ(r.message_count(), 0u);
  EXPECT_EQ(*r.endpoints["client"].result, present(Value::integer(0)));
  EXPECT_EQ(*r.endpoints["backup"].result, present(Value::integer(20)));
}

TEST(Scatter, OneMessagePerNonSelfLeaf) {
  std::vector<std::string> four{"a", "b", "c", "d"};
  auto r = simulated<Faceted<std::int64_t>>(four, [](ChoreoOp& op) {
    auto a = op.member("a");
    auto q = op.locally(a, [&](const Unwrapper&) {
      Quire<std::int64_t> out;
      for (std::size_t i = 0; i < op.census().size(); ++i) out.push_back(op.census()[i], static_cast<std::int64_t>(i));
      return out;
    });
    return op.scatter(a, op.everyone(), q);
  });
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.message_count(), 3u);
  EXPECT_EQ(*r.endpoints["c"].result, present(Value::integer(2)));

  auto self = central<Faceted<std::int64_t>>(four, [](ChoreoOp& op) {
    auto a = op.member("a");
    auto q = op.locally(a, [&](const Unwrapper&) { return Quire<std::int64_t>({Location("a")}, {9}); });
    return op.scatter(a, op.only(a), q);
  });
  EXPECT_EQ(self.message_count(), 0u);
}

TEST(Gather, OrderFollowsSenders) {
  auto r = simulated<Located<Quire<std::int64_t>>>({"s1", "s2", "s3", "r"}, [](ChoreoOp& op) {
    auto senders = op.subset({"s3", "s1", "s2"});
    auto f = op.parallel(senders, [](const MembershipWitness& q, const Unwrapper&) {
      return static_cast<std::int64_t>(q.location().name().back() - '0');
    });
    return op.gather(senders, op.only(op.member("r")), f);
  });
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.message_count(), 3u);
  auto q = decode<Quire<std::int64_t>>(encode_value(r.endpoints["r"].result->variant_value()));
  EXPECT_EQ(q.keys(), (std::vector<Location>{Location("s3"), Location("s1"), Location("s2")}));
  EXPECT_EQ(q.values(), (std::vector<std::int64_t>{3, 1, 2}));
}

TEST(Flatten, UnnestsEnclaveResult) {
  auto r = simulated<Located<std::int64_t>>(kThree, [](ChoreoOp& op) {
    auto servers = op.subset({"primary", "backup"});
    auto nested = op.enclave(servers, [](ChoreoOp& in) {
      return in.locally(in.member("primary"), [](const Unwrapper&) { return std::int64_t{8}; });
    });
    auto p = census_of({"primary"});
    return op.flatten(subset(p, servers.sub()), subset(p, p), nested);
  });
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(*r.endpoints["primary"].result, present(Value::integer(8)));
  EXPECT_EQ(*r.endpoints["backup"].result, absent());
  EXPECT_EQ(r.message_count(), 0u);
}

TEST(Flatten, RejectsWrongWitness) {
  auto r = central<Located<std::int64_t>>(kThree, [](ChoreoOp& op) {
    auto servers = op.subset({"primary", "backup"});
    auto nested = op.enclave(servers, [](ChoreoOp& in) {
      return in.locally(in.member("primary"), [](const Unwrapper&) { return std::int64_t{8}; });
    });
    auto p = census_of({"primary"});
    return op.flatten(subset(p, op.census()), subset(p, p), nested);
  });
  EXPECT_EQ(r.endpoints_with(ErrorCode::kWitnessMismatch).size(), 3u);
}

TEST(OthersForget, ShrinksOwners) {
  auto r = central<Located<std::int64_t>>({"p", "q", "r"}, [](ChoreoOp& op) {
    auto all = op.replicated([](const CongruentUnwrapper&) { return std::int64_t{4}; });
    return op.others_forget(subset(census_of({"q"}), op.census()), all);
  });
  EXPECT_EQ(*r.endpoints["q"].result, present(Value::integer(4)));
  EXPECT_EQ(*r.endpoints["p"].result, absent());
  EXPECT_EQ(*r.endpoints["r"].result, absent());
}

TEST(Witnesses, ForeignCensusIsRejected) {
  auto r = central<Located<bool>>({"p", "q"}, [](ChoreoOp& op) {
    auto foreign = member("p", census_of({"p", "z"}));
    return op.locally(foreign, [](const Unwrapper&) { return true; });
  });
  EXPECT_EQ(r.endpoints_with(ErrorCode::kWitnessMismatch).size(), 2u);
}

TEST(Roster, OfEmptyNamesIsEmpty) {
  auto c = census_of({"a", "b"});
  EXPECT_TRUE(Roster::of({}, c).empty());
  EXPECT_EQ(Roster::of({"b"}, c).members().front().index(), 1u);
}
