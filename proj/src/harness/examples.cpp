#include "harness/examples.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "protocols/gmw.hpp"
#include "protocols/lottery.hpp"

namespace harness {

using choreo::Error;
using choreo::ErrorCode;

Mode parse_mode(const std::string& text) {
  if (text == "centralized") return Mode::kCentralized;
  if (text == "simulate") return Mode::kSimulate;
  if (text == "endpoint") return Mode::kEndpoint;
  throw Error(ErrorCode::kConfigError, "unknown mode '" + text + "'");
}

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::kCentralized: return "centralized";
    case Mode::kSimulate: return "simulate";
    case Mode::kEndpoint: return "endpoint";
  }
  return {};
}

const std::vector<std::string>& example_names() {
  static const std::vector<std::string> names{"kvs-broadcast", "kvs-enclave", "kvs-error", "kvs-poly",
                                              "gmw",           "ot2",         "lottery"};
  return names;
}

std::vector<std::int64_t> default_secrets(std::size_t clients) {
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < clients; ++i) out.push_back(static_cast<std::int64_t>(1000 * (i + 1) + 7));
  return out;
}

std::string default_circuit(std::size_t parties) {
  if (parties <= 1) return "(and (in p1) (lit 1))";
  return "(xor (and (in p1) (in p2)) (in p" + std::to_string(parties) + "))";
}

namespace {

std::vector<std::string> party_names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back("p" + std::to_string(i));
  return out;
}

protocols::KvsArgs kvs_args(const RunConfig& c) {
  protocols::KvsArgs args;
  args.script = c.script;
  args.failing_backups = c.failing_backups;
  args.fail_after = c.fail_after;
  return args;
}

choreo::AnyChoreography negative_control() {
  // Each endpoint peeks at a value only alice holds. Alice then waits for bob
  // while bob, taking the other branch, waits for alice.
  choreo::Choreography<std::monostate, std::monostate> broken{
      choreo::census_of({"alice", "bob"}), [](choreo::ChoreoOp& op, const std::monostate&) {
        auto alice = op.member("alice");
        auto bob = op.member("bob");
        auto secret = op.locally(alice, [](const choreo::Unwrapper&) { return true; });
        bool peeked = choreo::LocatedAccess::payload(secret).value_or(false);
        if (peeked) {
          op.comm(bob, alice, op.locally(bob, [](const choreo::Unwrapper&) { return std::int64_t{1}; }));
        } else {
          op.comm(alice, bob, op.locally(alice, [](const choreo::Unwrapper&) { return std::int64_t{2}; }));
        }
        return std::monostate{};
      }};
  return {std::move(broken), std::monostate{}};
}

}  // namespace

choreo::AnyChoreography build_example(const RunConfig& c) {
  using protocols::KvsVariant;
  if (c.example == "kvs-broadcast") return {protocols::kvs_choreography(KvsVariant::kBroadcast), kvs_args(c)};
  if (c.example == "kvs-enclave") return {protocols::kvs_choreography(KvsVariant::kEnclave), kvs_args(c)};
  if (c.example == "kvs-error") return {protocols::kvs_choreography(KvsVariant::kErrorHandling), kvs_args(c)};
  if (c.example == "kvs-poly") return {protocols::kvs_poly_choreography(c.backups), kvs_args(c)};
  if (c.example == "gmw") {
    if (c.parties == 0) throw Error(ErrorCode::kConfigError, "gmw needs at least one party");
    auto circuit = protocols::parse_circuit(c.circuit.value_or(default_circuit(c.parties)));
    auto parties = party_names(c.parties);
    auto census = choreo::census_of(parties);
    for (const auto& [owner, n] : circuit.input_counts()) {
      if (!census.contains(owner)) throw Error(ErrorCode::kConfigError, "circuit input owner '" + owner + "' is not a party");
    }
    protocols::InputStreams inputs = c.inputs;
    if (inputs.empty()) {
      // Unspecified inputs default to alternating bits per party.
      for (const auto& [owner, n] : circuit.input_counts()) {
        for (std::size_t i = 0; i < n; ++i) inputs[owner].push_back(i % 2 == 0);
      }
    }
    return {protocols::gmw_choreography(census), protocols::GmwArgs{circuit, inputs}};
  }
  if (c.example == "ot2") {
    protocols::Ot2Args args;
    auto bit = [&](const std::string& name, bool fallback) {
      auto it = c.inputs.find(name);
      return it == c.inputs.end() || it->second.empty() ? fallback : static_cast<bool>(it->second.front());
    };
    args.b1 = bit("b1", true);
    args.b2 = bit("b2", false);
    args.select = bit("s", false);
    return {protocols::ot2_choreography(), args};
  }
  if (c.example == "lottery") {
    protocols::LotteryArgs args;
    args.secrets = c.secrets.empty() ? default_secrets(c.clients) : c.secrets;
    args.rho = c.rho;
    args.tamper_server = c.tamper_server;
    return {protocols::lottery_choreography(c.servers, c.clients), args};
  }
  if (c.example == kNegativeControl) return negative_control();
  throw Error(ErrorCode::kConfigError, "unknown example '" + c.example + "'");
}

choreo::RunReport run_example(const RunConfig& c) {
  auto choreography = build_example(c);
  switch (c.mode) {
    case Mode::kCentralized: return choreography.centralized(c.seed);
    case Mode::kSimulate: return choreography.simulated(c.seed, choreo::SimOptions{c.step_budget});
    case Mode::kEndpoint: {
      if (c.role.empty()) throw Error(ErrorCode::kConfigError, "endpoint mode needs --role");
      if (!choreography.census().contains(c.role)) {
        throw Error(ErrorCode::kConfigError, "role '" + c.role + "' is not in census " + choreography.census().to_string());
      }
      for (const auto& l : choreography.census()) {
        if (!c.address_book.count(l.name())) throw Error(ErrorCode::kConfigError, "address book lacks " + l.name());
      }
      choreo::Location self(c.role);
      choreo::TcpTransport transport(self, c.address_book);
      auto report = choreography.endpoint(self, transport, c.seed);
      transport.close();
      return report;
    }
  }
  throw Error(ErrorCode::kConfigError, "unknown mode");
}

choreo::AddressBook parse_address_book(const std::string& json_text) {
  choreo::AddressBook book;
  try {
    auto doc = nlohmann::json::parse(json_text);
    const auto& locations = doc.at("locations");
    if (!locations.is_object()) throw Error(ErrorCode::kConfigError, "\"locations\" must be an object");
    for (const auto& [name, address] : locations.items()) book[name] = address.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("address book: ") + e.what());
  }
  return book;
}

choreo::AddressBook load_address_book(const std::string& path) { return parse_address_book(read_file(path)); }

protocols::InputStreams parse_inputs(const std::string& text) {
  protocols::InputStreams out;
  std::stringstream entries(text);
  std::string entry;
  while (std::getline(entries, entry, ',')) {
    if (entry.empty()) continue;
    auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(ErrorCode::kConfigError, "input '" + entry + "' is not name=bit");
    auto bit = entry.substr(eq + 1);
    if (bit != "0" && bit != "1") throw Error(ErrorCode::kConfigError, "input bit must be 0 or 1 in '" + entry + "'");
    out[entry.substr(0, eq)].push_back(bit == "1");
  }
  return out;
}

std::string format_results(const choreo::RunReport& report) {
  std::ostringstream os;
  for (const auto& name : report.census) {
    auto it = report.endpoints.find(name);
    if (it == report.endpoints.end()) continue;
    const auto& out = it->second;
    os << name << ": ";
    if (out.result) {
      os << out.result->to_string();
    } else {
      os << "error " << (out.error ? std::string(choreo::error_code_name(*out.error)) : "Unknown") << " ("
         << out.message << ")";
    }
    os << '\n';
  }
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace harness
