#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "choreo/runtime.hpp"
#include "choreo/tcp_transport.hpp"
#include "protocols/circuit.hpp"
#include "protocols/kvs.hpp"

namespace harness {

enum class Mode { kCentralized, kSimulate, kEndpoint };

Mode parse_mode(const std::string& text);
std::string mode_name(Mode mode);

/// Everything needed to run one example once.
struct RunConfig {
  std::string example;
  Mode mode = Mode::kCentralized;
  std::uint64_t seed = 0;
  std::string role;
  choreo::AddressBook address_book;
  std::vector<protocols::Request> script;
  std::set<std::string> failing_backups;
  std::size_t fail_after = 0;
  std::optional<std::string> circuit;
  protocols::InputStreams inputs;
  std::size_t parties = 2;
  std::size_t backups = 2;
  std::size_t servers = 3;
  std::size_t clients = 4;
  std::vector<std::int64_t> secrets;
  std::optional<std::vector<std::int64_t>> rho;
  std::optional<std::string> tamper_server;
  std::uint64_t step_budget = 10000;
};

/// Names accepted by `build_example`, excluding the negative control.
const std::vector<std::string>& example_names();

/// Deliberately broken choreography: endpoints branch on a value only one of
/// them holds, so their projections wait on each other forever.
inline constexpr const char* kNegativeControl = "broken-koc";

/// Default secrets used when a lottery config supplies none.
std::vector<std::int64_t> default_secrets(std::size_t clients);
/// Default circuit text for `parties` parties.
std::string default_circuit(std::size_t parties);

/// Throws ConfigError for unknown examples or malformed parameters.
choreo::AnyChoreography build_example(const RunConfig& config);

/// Runs per `config.mode`. Endpoint mode opens a TCP transport from the
/// address book and plays `config.role` only.
choreo::RunReport run_example(const RunConfig& config);

/// `{"locations": {"name": "host:port", ...}}`
choreo::AddressBook parse_address_book(const std::string& json_text);
choreo::AddressBook load_address_book(const std::string& path);

/// `p1=1,p2=0,p1=1`: each entry appends one bit to that party's stream.
protocols::InputStreams parse_inputs(const std::string& text);

/// One line per endpoint: `name: value` or `name: error Code: message`.
std::string format_results(const choreo::RunReport& report);

std::string read_file(const std::string& path);

}  // namespace harness
