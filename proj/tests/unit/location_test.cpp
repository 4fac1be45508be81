#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "choreo/location.hpp"
#include "choreo/error.hpp"

using namespace choreo;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::kConfigError;
}

const Census kParticipants = census_of({"client", "primary", "backup"});
const Census kServers = census_of({"primary", "backup"});

}  // namespace

TEST(Census, KeepsGivenOrder) {
  EXPECT_EQ(kParticipants.size(), 3u);
  EXPECT_EQ(kParticipants.names(), (std::vector<std::string>{"client", "primary", "backup"}));
  EXPECT_EQ(kParticipants.index_of("backup"), 2u);
}

TEST(Census, RejectsEmptyAndDuplicates) {
  EXPECT_EQ(code_of([] { census_of(std::vector<std::string>{}); }), ErrorCode::kEmptyCensus);
  EXPECT_EQ(code_of([] { census_of({"a", "a"}); }), ErrorCode::kDuplicateLocation);
}

TEST(Location, RejectsEmptyName) {
  EXPECT_THROW(Location(""), Error);
  EXPECT_EQ(Location("x"), Location("x"));
}

TEST(Member, FindsIndex) {
  EXPECT_EQ(member("primary", kParticipants).index(), 1u);
  EXPECT_EQ(member("backup", kServers).index(), 1u);
  EXPECT_EQ(code_of([] { member("mallory", kParticipants); }), ErrorCode::kNotAMember);
}

TEST(Subset, BuildsIndexMap) {
  auto s = subset(kServers, kParticipants);
  EXPECT_EQ(s.index_map(), (std::vector<std::size_t>{1, 2}));
  auto id = subset(kParticipants, kParticipants);
  EXPECT_EQ(id.index_map(), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Subset, NamesOffendingLocation) {
  try {
    subset(census_of({"client"}), kServers);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotASubset);
    EXPECT_NE(std::string(e.what()).find("client"), std::string::npos);
  }
}

TEST(Compose, ChasesIndices) {
  auto backup = member("backup", kServers);
  auto lifted = compose(backup, subset(kServers, kParticipants));
  EXPECT_EQ(lifted.index(), 2u);
  EXPECT_EQ(lifted, member("backup", kParticipants));
}

TEST(Compose, IdentityLaw) {
  auto p = member("primary", kServers);
  EXPECT_EQ(compose(p, subset(kServers, kServers)), p);
}

TEST(Compose, RejectsMismatchedCensus) {
  auto p = member("primary", kParticipants);
  EXPECT_EQ(code_of([&] { compose(p, subset(kServers, kParticipants)); }), ErrorCode::kWitnessMismatch);
}

// Random censuses and random sub-lists: every witness satisfies its index
// invariant and composition agrees with direct membership.
TEST(WitnessProperty, SoundnessAndComposition) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t n = 1 + rng() % 8;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("l" + std::to_string(rng() % 1000) + "_" + std::to_string(i));
    std::shuffle(names.begin(), names.end(), rng);
    auto sup = census_of(names);

    std::vector<std::string> sub_names;
    for (const auto& name : names) {
      if (rng() % 2 == 0) sub_names.push_back(name);
    }
    if (sub_names.empty()) sub_names.push_back(names[rng() % n]);
    std::shuffle(sub_names.begin(), sub_names.end(), rng);
    auto sub = census_of(sub_names);
    auto s = subset(sub, sup);
    ASSERT_EQ(s.index_map().size(), sub.size());
    for (std::size_t i = 0; i < sub.size(); ++i) {
      EXPECT_EQ(sup[s.index_map()[i]], sub[i]);
      auto m = member(sub[i].name(), sub);
      EXPECT_EQ(sub[m.index()], m.location());
      EXPECT_EQ(compose(m, s), member(sub[i].name(), sup));
    }
  }
}
