#include <gtest/gtest.h>

#include <random>

#include "choreo/located.hpp"
#include "choreo/portable.hpp"
#include "choreo/rng.hpp"
#include "protocols/kvs.hpp"

using namespace choreo;

namespace {

Value random_value(std::mt19937_64& rng, int depth) {
  int kind = static_cast<int>(rng() % (depth > 0 ? 8 : 4));
  switch (kind) {
    case 0: return Value::unit();
    case 1: return Value::boolean(rng() % 2 == 1);
    case 2: return Value::integer(static_cast<std::int64_t>(rng()));
    case 3: {
      std::string s;
      for (std::size_t i = rng() % 6; i > 0; --i) s.push_back(static_cast<char>(rng() % 256));
      return Value::text(s);
    }
    case 4: return Value::pair(random_value(rng, depth - 1), random_value(rng, depth - 1));
    case 5: return Value::variant(static_cast<std::uint8_t>(rng() % 3), random_value(rng, depth - 1));
    case 6: {
      std::vector<Value> items;
      for (std::size_t i = rng() % 4; i > 0; --i) items.push_back(random_value(rng, depth - 1));
      return Value::sequence(std::move(items));
    }
    default: {
      std::vector<std::pair<Value, Value>> entries;
      for (std::size_t i = rng() % 4; i > 0; --i) {
        entries.emplace_back(Value::integer(static_cast<std::int64_t>(i * 10 + rng() % 5) * (i % 2 ? 1 : -1)),
                             random_value(rng, depth - 1));
      }
      std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first.as_int() < b.first.as_int(); });
      entries.erase(std::unique(entries.begin(), entries.end(),
                                [](const auto& a, const auto& b) { return a.first == b.first; }),
                    entries.end());
      return Value::map(std::move(entries));
    }
  }
}

}  // namespace

TEST(Encoding, ByteGrammar) {
  EXPECT_EQ(encode_value(Value::unit()), (Bytes{0}));
  EXPECT_EQ(encode(true), (Bytes{1, 1}));
  EXPECT_EQ(encode(std::int64_t{1}), (Bytes{2, 0, 0, 0, 0, 0, 0, 0, 1}));
  EXPECT_EQ(encode(std::int64_t{-2}), (Bytes{2, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xfe}));
  EXPECT_EQ(encode(std::string("ab")), (Bytes{3, 0, 0, 0, 2, 'a', 'b'}));
  EXPECT_EQ(encode(std::pair<bool, bool>(true, false)), (Bytes{4, 1, 1, 1, 0}));
  EXPECT_EQ(encode(std::optional<bool>(true)), (Bytes{5, 1, 1, 1}));
  EXPECT_EQ(encode(std::vector<bool>{false}), (Bytes{6, 0, 0, 0, 1, 1, 0}));
}

TEST(Encoding, MapEntriesAreSorted) {
  std::map<std::string, std::int64_t> m{{"b", 2}, {"a", 1}};
  auto bytes = encode(m);
  ASSERT_GE(bytes.size(), 5u);
  EXPECT_EQ(bytes[0], 7);
  EXPECT_EQ(bytes[4], 2);
  EXPECT_EQ(decode<decltype(m)>(bytes), m);
}

TEST(Encoding, RoundTripsAndDeterminism) {
  EXPECT_TRUE(decode<bool>(encode(true)));
  auto get = protocols::Request::get("k");
  EXPECT_EQ(encode(get), encode(protocols::Request::get("k")));
  EXPECT_EQ(decode<protocols::Request>(encode(protocols::Request::put("k", 5))), protocols::Request::put("k", 5));
}

TEST(Encoding, RejectsMalformed) {
  auto bytes = encode(std::string("hello"));
  bytes.pop_back();
  try {
    decode<std::string>(bytes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDecodeError);
  }
  EXPECT_THROW(decode_value(Bytes{9}), Error);
  EXPECT_THROW(decode_value(Bytes{1, 1, 0}), Error);  // trailing byte
  EXPECT_THROW(decode_value(Bytes{}), Error);
}

TEST(EncodingProperty, RandomValuesRoundTrip) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    auto v = random_value(rng, 4);
    auto bytes = encode_value(v);
    EXPECT_EQ(decode_value(bytes), v);
    EXPECT_EQ(encode_value(decode_value(bytes)), bytes);
  }
}

TEST(Quire, KeyOrderAndCodec) {
  Quire<std::int64_t> q({Location("b"), Location("a")}, {2, 1});
  EXPECT_EQ(q.at("a"), 1);
  EXPECT_EQ(q.keys().front(), Location("b"));
  EXPECT_EQ(decode<Quire<std::int64_t>>(encode(q)), q);
  EXPECT_THROW(Quire<std::int64_t>({Location("a"), Location("a")}, {1, 2}), Error);
  EXPECT_THROW(q.at("c"), Error);
  EXPECT_EQ(q.with(Location("a"), 9).at("a"), 9);
}

TEST(Rng, EndpointStreamsAreIndependentAndStable) {
  auto a1 = endpoint_rng(5, "alice");
  auto a2 = endpoint_rng(5, "alice");
  auto b = endpoint_rng(5, "bob");
  auto a_other_seed = endpoint_rng(6, "alice");
  auto x = a1();
  EXPECT_EQ(x, a2());
  EXPECT_NE(x, b());
  EXPECT_NE(x, a_other_seed());
  for (int i = 0; i < 1000; ++i) EXPECT_LT(uniform_below(a1, 7), 7u);
}
