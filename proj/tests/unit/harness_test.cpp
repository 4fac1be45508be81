#include <gtest/gtest.h>

#include "harness/conformance.hpp"
#include "harness/examples.hpp"

using namespace harness;
using choreo::Error;
using choreo::ErrorCode;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::kEmptyCensus;
}

}  // namespace

TEST(Harness, ParseMode) {
  EXPECT_EQ(parse_mode("simulate"), Mode::kSimulate);
  EXPECT_EQ(mode_name(parse_mode("endpoint")), "endpoint");
  EXPECT_EQ(code_of([] { parse_mode("fast"); }), ErrorCode::kConfigError);
}

TEST(Harness, ParseInputsAppends) {
  auto in = parse_inputs("p1=1,p2=0,p1=0");
  EXPECT_EQ(in["p1"], (std::vector<bool>{true, false}));
  EXPECT_EQ(in["p2"], (std::vector<bool>{false}));
  EXPECT_EQ(code_of([] { parse_inputs("p1=2"); }), ErrorCode::kConfigError);
  EXPECT_EQ(code_of([] { parse_inputs("=1"); }), ErrorCode::kConfigError);
}

TEST(Harness, AddressBook) {
  auto book = parse_address_book(R"({"locations": {"client": "127.0.0.1:9000", "primary": "127.0.0.1:9001"}})");
  EXPECT_EQ(book.at("primary"), "127.0.0.1:9001");
  EXPECT_EQ(code_of([] { parse_address_book("{}"); }), ErrorCode::kConfigError);
  EXPECT_EQ(code_of([] { parse_address_book("{\"locations\": []}"); }), ErrorCode::kConfigError);
  EXPECT_EQ(code_of([] { parse_address_book("not json"); }), ErrorCode::kConfigError);
}

TEST(Harness, UnknownExampleAndBadCircuitOwner) {
  RunConfig c;
  c.example = "nope";
  EXPECT_EQ(code_of([&] { build_example(c); }), ErrorCode::kConfigError);
  c.example = "gmw";
  c.parties = 2;
  c.circuit = "(in p7)";
  EXPECT_EQ(code_of([&] { build_example(c); }), ErrorCode::kConfigError);
}

TEST(Harness, EndpointModeValidatesRole) {
  RunConfig c;
  c.example = "ot2";
  c.mode = Mode::kEndpoint;
  EXPECT_EQ(code_of([&] { run_example(c); }), ErrorCode::kConfigError);
  c.role = "mallory";
  EXPECT_EQ(code_of([&] { run_example(c); }), ErrorCode::kConfigError);
  c.role = "sender";
  EXPECT_EQ(code_of([&] { run_example(c); }), ErrorCode::kConfigError);  // empty address book
}

TEST(Harness, FormatResults) {
  RunConfig c;
  c.example = "ot2";
  c.inputs = parse_inputs("b1=1,b2=0,s=1");
  auto text = format_results(run_example(c));
  EXPECT_EQ(text, "sender: #0 ()\nreceiver: #1 false\n");
}

TEST(Harness, ExampleConfigsRunCleanly) {
  for (const auto& config : Conformance::example_configs()) {
    auto r = build_example(config).centralized(1);
    EXPECT_TRUE(r.ok()) << config.example << ": " << format_results(r);
  }
}

TEST(Harness, EveryExampleBuildsWithDefaults) {
  for (const auto& name : example_names()) {
    RunConfig c;
    c.example = name;
    auto r = run_example(c);
    EXPECT_TRUE(r.ok()) << name;
  }
}

TEST(Harness, NegativeControlDeadlocksOnlyInSimulation) {
  RunConfig c;
  c.example = kNegativeControl;
  c.mode = Mode::kSimulate;
  auto r = run_example(c);
  EXPECT_FALSE(r.endpoints_with(ErrorCode::kStepBudgetExceeded).empty());
}
