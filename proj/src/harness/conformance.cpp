#include "harness/conformance.hpp"

#include <fcntl.h>
#include <netinet/in.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>
#include <set>

#include "protocols/circuit.hpp"
#include "protocols/field.hpp"
#include "protocols/gmw.hpp"
#include "protocols/kvs.hpp"
#include "protocols/lottery.hpp"

namespace harness {

using choreo::ErrorCode;
using choreo::RunReport;
using choreo::Value;
using protocols::Request;

namespace {

std::string describe(const RunReport& r) {
  std::ostringstream os;
  for (const auto& name : r.census) {
    const auto& out = r.endpoints.at(name);
    os << name << '=' << (out.result ? out.result->to_string() : "error:" + out.message) << ' ';
  }
  return os.str();
}

// Result of `endpoint`, unwrapping the Located/Faceted rendering when `item`
// names a position in a tuple result.
std::optional<Value> held(const RunReport& r, const std::string& endpoint, std::optional<std::size_t> item = {}) {
  auto it = r.endpoints.find(endpoint);
  if (it == r.endpoints.end() || !it->second.result) return std::nullopt;
  const Value* v = &*it->second.result;
  if (item) {
    if (v->kind() != Value::Kind::kSequence || v->items().size() <= *item) return std::nullopt;
    v = &v->items()[*item];
  }
  if (v->kind() != Value::Kind::kUnion || v->variant_index() != 1) return std::nullopt;
  return v->variant_value();
}

std::optional<std::vector<protocols::Response>> client_responses(const RunReport& r) {
  auto v = held(r, "client", 0);
  if (!v) return std::nullopt;
  return choreo::from_value<std::vector<protocols::Response>>(*v);
}

std::optional<protocols::Store> store_at(const RunReport& r, const std::string& server) {
  auto v = held(r, server, 1);
  if (!v) return std::nullopt;
  return choreo::from_value<protocols::Store>(*v);
}

std::vector<Request> random_script(std::mt19937_64& rng, std::size_t length) {
  static const std::vector<std::string> keys{"a", "b", "c"};
  std::vector<Request> out;
  for (std::size_t i = 0; i < length; ++i) {
    const auto& key = keys[rng() % keys.size()];
    if (rng() % 2 == 0) {
      out.push_back(Request::get(key));
    } else {
      out.push_back(Request::put(key, static_cast<std::int64_t>(1 + rng() % 99)));
    }
  }
  return out;
}

const std::vector<Request>& sample_script() {
  static const std::vector<Request> script{Request::put("k", 5), Request::get("k"), Request::get("missing"),
                                           Request::put("k", 7), Request::get("k")};
  return script;
}

protocols::Store reference_store(const std::vector<Request>& script) {
  protocols::Store s;
  for (const auto& r : script) protocols::apply_request(r, s);
  return s;
}

std::string join(const std::vector<std::string>& xs, std::size_t limit = 5) {
  std::string out;
  for (std::size_t i = 0; i < xs.size() && i < limit; ++i) out += (i ? "; " : "") + xs[i];
  if (xs.size() > limit) out += "; ... (" + std::to_string(xs.size()) + " total)";
  return out;
}

// Per server: every alpha from the other servers was consumed before the
// server sent any psi or rho. Server-to-server envelopes carry seq 0 (alpha),
// 1 (psi), 2 (rho).
bool lottery_ordering_holds(const RunReport& r, const std::vector<std::string>& servers, std::string& why) {
  std::set<std::string> server_set(servers.begin(), servers.end());
  std::uint64_t last_alpha_sent = 0;
  std::uint64_t first_open_sent = UINT64_MAX;
  for (const auto& m : r.messages) {
    if (!server_set.count(m.sender) || !server_set.count(m.receiver)) continue;
    if (m.seq == 0) last_alpha_sent = std::max(last_alpha_sent, m.sent_at);
    else first_open_sent = std::min(first_open_sent, m.sent_at);
  }
  if (first_open_sent <= last_alpha_sent) {
    why = "an opening was sent at t=" + std::to_string(first_open_sent) + " before the last alpha";
    return false;
  }
  for (const auto& s : servers) {
    std::size_t alphas = 0;
    std::uint64_t last_alpha = 0;
    std::uint64_t first_open = UINT64_MAX;
    for (const auto& m : r.messages) {
      if (!server_set.count(m.sender) || !server_set.count(m.receiver)) continue;
      if (m.receiver == s && m.seq == 0) {
        if (!m.received_at) {
          why = "alpha " + m.sender + "->" + s + " never consumed";
          return false;
        }
        ++alphas;
        last_alpha = std::max(last_alpha, *m.received_at);
      }
      if (m.sender == s && m.seq >= 1) first_open = std::min(first_open, m.sent_at);
    }
    if (alphas + 1 != servers.size()) {
      why = s + " received " + std::to_string(alphas) + " alphas";
      return false;
    }
    if (first_open <= last_alpha) {
      why = s + " opened at t=" + std::to_string(first_open) + " before its last alpha at t=" + std::to_string(last_alpha);
      return false;
    }
  }
  return true;
}

// Loopback port that was free a moment ago.
int free_port() {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  ::close(fd);
  return ntohs(addr.sin_port);
}

pid_t spawn(const std::vector<std::string>& argv, const std::string& out_path) {
  pid_t pid = ::fork();
  if (pid != 0) return pid;
  int fd = ::open(out_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd >= 0) {
    ::dup2(fd, STDOUT_FILENO);
    ::dup2(fd, STDERR_FILENO);
  }
  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);
  ::execv(args[0], args.data());
  ::_exit(127);
}

// Exit statuses of `pids`; processes still running at the deadline are killed
// and reported as -1.
std::vector<int> wait_all(const std::vector<pid_t>& pids, std::chrono::seconds timeout) {
  std::vector<int> status(pids.size(), -1);
  std::vector<bool> done(pids.size(), false);
  auto deadline = std::chrono::steady_clock::now() + timeout;
  std::size_t remaining = pids.size();
  while (remaining > 0 && std::chrono::steady_clock::now() < deadline) {
    for (std::size_t i = 0; i < pids.size(); ++i) {
      if (done[i]) continue;
      int st = 0;
      if (::waitpid(pids[i], &st, WNOHANG) == pids[i]) {
        done[i] = true;
        --remaining;
        status[i] = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
      }
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  for (std::size_t i = 0; i < pids.size(); ++i) {
    if (done[i]) continue;
    ::kill(pids[i], SIGKILL);
    ::waitpid(pids[i], nullptr, 0);
  }
  return status;
}

}  // namespace

const std::vector<std::string>& Conformance::suite_names() {
  static const std::vector<std::string> names{"economy",     "error-path", "poly",     "gmw",
                                              "ot2",         "lottery",    "deadlock", "equivalence",
                                              "tcp",         "agreement"};
  return names;
}

std::vector<CriterionResult> Conformance::run(const std::string& suite) {
  std::vector<CriterionResult> out;
  auto one = [&](const std::string& name) {
    if (name == "economy") out.push_back(message_economy());
    else if (name == "error-path") out.push_back(error_path());
    else if (name == "poly") out.push_back(census_polymorphism());
    else if (name == "gmw") out.push_back(gmw_exhaustive());
    else if (name == "ot2") out.push_back(ot2_truth_table());
    else if (name == "lottery") out.push_back(lottery());
    else if (name == "deadlock") out.push_back(deadlock_freedom());
    else if (name == "equivalence") out.push_back(projection_equivalence());
    else if (name == "tcp") out.push_back(tcp_interchangeability());
    else if (name == "agreement") out.push_back(agreement());
    else if (name == "negative-control") out.push_back(negative_control());
    else throw choreo::Error(ErrorCode::kConfigError, "unknown suite '" + name + "'");
  };
  if (suite == "all") {
    for (const auto& name : suite_names()) one(name);
  } else {
    one(suite);
  }
  return out;
}

CriterionResult Conformance::timed(const std::string& name, double limit,
                                   const std::function<std::string(bool&)>& body) {
  CriterionResult r;
  r.name = name;
  r.limit_seconds = limit;
  auto start = std::chrono::steady_clock::now();
  bool ok = true;
  try {
    r.detail = body(ok);
  } catch (const std::exception& e) {
    ok = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.passed = ok;
  if (ok && limit > 0 && r.seconds > limit) {
    r.passed = false;
    r.detail += " (exceeded time limit)";
  }
  return r;
}

RunReport Conformance::simulate(const choreo::AnyChoreography& c, std::uint64_t seed, std::uint64_t budget) {
  auto report = c.simulated(seed, choreo::SimOptions{budget});
  ++agreement_reports_;
  agreement_records_ += report.agreement.size();
  for (auto& v : choreo::agreement_violations(report)) agreement_violations_.push_back(std::move(v));
  return report;
}

std::vector<RunConfig> Conformance::example_configs() {
  std::vector<RunConfig> out;
  auto add = [&](RunConfig c) { out.push_back(std::move(c)); };
  for (const char* name : {"kvs-broadcast", "kvs-enclave", "kvs-error"}) {
    RunConfig c;
    c.example = name;
    c.script = sample_script();
    add(c);
  }
  {
    RunConfig c;
    c.example = "kvs-error";
    c.script = sample_script();
    c.failing_backups = {"backup"};
    c.fail_after = 3;
    add(c);
  }
  for (std::size_t b : {0, 2}) {
    RunConfig c;
    c.example = "kvs-poly";
    c.backups = b;
    c.script = sample_script();
    add(c);
  }
  {
    RunConfig c;
    c.example = "kvs-poly";
    c.backups = 3;
    c.script = sample_script();
    c.failing_backups = {"backup2"};
    c.fail_after = 1;
    add(c);
  }
  {
    RunConfig c;
    c.example = "gmw";
    c.parties = 1;
    add(c);
  }
  {
    RunConfig c;
    c.example = "gmw";
    c.parties = 2;
    c.circuit = "(and (in p1) (in p2))";
    c.inputs = {{"p1", {true}}, {"p2", {true}}};
    add(c);
  }
  {
    RunConfig c;
    c.example = "gmw";
    c.parties = 3;
    c.circuit = "(xor (and (in p1) (in p2)) (and (in p3) (lit 1)))";
    c.inputs = {{"p1", {true}}, {"p2", {false}}, {"p3", {true}}};
    add(c);
  }
  {
    RunConfig c;
    c.example = "ot2";
    c.inputs = {{"b1", {true}}, {"b2", {false}}, {"s", {true}}};
    add(c);
  }
  {
    RunConfig c;
    c.example = "lottery";
    add(c);
  }
  {
    RunConfig c;
    c.example = "lottery";
    c.servers = 1;
    c.clients = 1;
    add(c);
  }
  {
    RunConfig c;
    c.example = "lottery";
    c.servers = 2;
    c.clients = 3;
    c.rho = std::vector<std::int64_t>{1, 2};
    add(c);
  }
  return out;
}

CriterionResult Conformance::message_economy() {
  return timed("message economy: enclave KVS sends one fewer message per request", 1.0, [&](bool& ok) {
    std::vector<std::string> failures;
    auto counts = [&](const std::vector<Request>& script, std::uint64_t seed, bool simulated) {
      RunConfig c;
      c.script = script;
      c.seed = seed;
      c.example = "kvs-broadcast";
      auto b = build_example(c);
      c.example = "kvs-enclave";
      auto e = build_example(c);
      auto rb = simulated ? simulate(b, seed) : b.centralized(seed);
      auto re = simulated ? simulate(e, seed) : e.centralized(seed);
      auto expected = protocols::reference_responses(script);
      if (!rb.ok() || !re.ok()) failures.push_back("run failed: " + describe(rb) + " | " + describe(re));
      if (client_responses(rb) != expected || client_responses(re) != expected) {
        failures.push_back("responses differ from the reference model");
      }
      return std::pair<std::size_t, std::size_t>(rb.message_count(), re.message_count());
    };
    auto expect = [&](const std::string& what, std::pair<std::size_t, std::size_t> got, std::size_t b, std::size_t e) {
      if (got.first != b || got.second != e) {
        failures.push_back(what + ": " + std::to_string(got.first) + " vs " + std::to_string(got.second) +
                           ", expected " + std::to_string(b) + " vs " + std::to_string(e));
      }
    };
    for (bool sim : {false, true}) {
      expect("one Get", counts({Request::get("k")}, 1, sim), 4, 3);
      expect("one Put", counts({Request::put("k", 5)}, 1, sim), 5, 4);
      expect("empty script", counts({}, 1, sim), 0, 0);
    }
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 20; ++i) {
      auto script = random_script(rng, 1 + rng() % 8);
      std::size_t gets = std::count_if(script.begin(), script.end(),
                                       [](const Request& r) { return r.kind == Request::Kind::kGet; });
      std::size_t puts = script.size() - gets;
      expect("script " + std::to_string(i), counts(script, static_cast<std::uint64_t>(i), i % 2 == 1),
             4 * gets + 5 * puts, 3 * gets + 4 * puts);
    }
    ok = failures.empty();
    return ok ? std::string("Get 4 vs 3, Put 5 vs 4, 20 random scripts delta == request count")
              : join(failures);
  });
}

CriterionResult Conformance::error_path() {
  return timed("error path: second enclave exchanges 0 messages", 1.0, [&](bool& ok) {
    std::vector<std::string> failures;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      RunConfig c;
      c.example = "kvs-error";
      c.script = {Request::put("k", 5)};
      c.failing_backups = {"backup"};
      c.seed = seed;
      auto chor = build_example(c);
      for (bool sim : {false, true}) {
        auto r = sim ? simulate(chor, seed) : chor.centralized(seed);
        if (client_responses(r) != std::vector<protocols::Response>{protocols::kDesync}) {
          failures.push_back("client did not get -1: " + describe(r));
          continue;
        }
        std::optional<std::uint64_t> branch_at;
        for (const auto& server : {"primary", "backup"}) {
          bool took_error = false;
          for (const auto& b : r.branches) {
            if (b.endpoint == server && b.site.rfind(protocols::kBackupStatusSite, 0) == 0) {
              took_error = b.outcome == "error";
              branch_at = std::min(branch_at.value_or(b.at), b.at);
            }
          }
          if (!took_error) failures.push_back(std::string(server) + " did not take the error branch");
        }
        if (!branch_at) continue;
        choreo::MessageFilter after;
        after.sent_from = *branch_at;
        after.within = {"primary", "backup"};
        auto n = choreo::sim_message_count(r.messages, after);
        if (n != 0) failures.push_back(std::to_string(n) + " server messages after the error branch");
        auto stores = std::pair(store_at(r, "primary"), store_at(r, "backup"));
        if (stores.first != protocols::Store{} || stores.second != protocols::Store{}) {
          failures.push_back("a server applied the failed Put");
        }
      }
    }
    // Without a failure the variant matches the enclave KVS exactly.
    RunConfig c;
    c.script = sample_script();
    c.example = "kvs-error";
    auto with_handling = build_example(c).centralized(3);
    c.example = "kvs-enclave";
    auto plain = build_example(c).centralized(3);
    if (client_responses(with_handling) != client_responses(plain) ||
        with_handling.message_count() != plain.message_count()) {
      failures.push_back("healthy run differs from kvs-enclave");
    }
    ok = failures.empty();
    return ok ? std::string("error branch at both servers, 0 server messages after it, healthy run == kvs-enclave")
              : join(failures);
  });
}

CriterionResult Conformance::census_polymorphism() {
  return timed("census polymorphism: kvs-poly for 0, 1, 2, 5, 10 backups", 5.0, [&](bool& ok) {
    std::vector<std::string> failures;
    std::mt19937_64 rng(77);
    for (std::size_t backups : {0, 1, 2, 5, 10}) {
      auto script = random_script(rng, 8);
      script.push_back(Request::put("z", 42));
      RunConfig c;
      c.example = "kvs-poly";
      c.backups = backups;
      c.script = script;
      auto chor = build_example(c);
      auto expected = protocols::reference_responses(script);
      auto expected_store = reference_store(script);
      for (bool sim : {false, true}) {
        auto r = sim ? simulate(chor, backups) : chor.centralized(backups);
        if (client_responses(r) != expected) failures.push_back(std::to_string(backups) + " backups: responses differ");
        std::vector<std::string> servers{"primary"};
        for (std::size_t i = 1; i <= backups; ++i) servers.push_back("backup" + std::to_string(i));
        for (const auto& s : servers) {
          if (store_at(r, s) != expected_store) failures.push_back(std::to_string(backups) + " backups: " + s + " store differs");
        }
      }
    }
    RunConfig c;
    c.example = "kvs-poly";
    c.backups = 3;
    c.script = {Request::put("a", 1), Request::put("a", 2), Request::get("a")};
    c.failing_backups = {"backup2"};
    c.fail_after = 1;
    auto chor = build_example(c);
    for (bool sim : {false, true}) {
      auto r = sim ? simulate(chor, 9) : chor.centralized(9);
      if (client_responses(r) != std::vector<protocols::Response>{0, protocols::kDesync, 1}) {
        failures.push_back("failing backup: responses " + describe(r));
      }
      if (store_at(r, "primary") != protocols::Store{{"a", 1}}) failures.push_back("failing backup: primary store changed");
    }
    ok = failures.empty();
    return ok ? std::string("model responses and consistent replicas; failing backup gives -1 and keeps primary")
              : join(failures);
  });
}

CriterionResult Conformance::gmw_exhaustive() {
  return timed("GMW: every depth<=3 circuit, n in {2,3}, all inputs, centralized and simulated", 300.0, [&](bool& ok) {
    std::size_t runs = 0;
    std::size_t circuits_total = 0;
    std::vector<std::string> failures;
    for (auto n : options_.gmw_parties) {
      std::vector<std::string> parties;
      for (std::size_t i = 1; i <= n; ++i) parties.push_back("p" + std::to_string(i));
      auto chor = protocols::gmw_choreography(choreo::census_of(parties));
      auto circuits = protocols::enumerate_circuits(parties, options_.gmw_max_depth);
      circuits_total += circuits.size();
      for (const auto& circuit : circuits) {
        for (const auto& inputs : protocols::enumerate_inputs(circuit, parties)) {
          const Value expected = Value::boolean(protocols::eval_circuit(circuit, inputs));
          protocols::GmwArgs args{circuit, inputs};
          for (int seed = 0; seed < options_.gmw_seeds; ++seed) {
            for (bool sim : {false, true}) {
              RunReport r;
              if (sim) {
                r = choreo::run_simulated(chor, args, static_cast<std::uint64_t>(seed));
                ++agreement_reports_;
                agreement_records_ += r.agreement.size();
                for (auto& v : choreo::agreement_violations(r)) agreement_violations_.push_back(std::move(v));
              } else {
                r = choreo::run_centralized(chor, args, static_cast<std::uint64_t>(seed));
              }
              ++runs;
              for (const auto& p : parties) {
                const auto& out = r.endpoints[p];
                if (!out.result || *out.result != expected) {
                  failures.push_back("n=" + std::to_string(n) + " " + circuit.to_string() + " seed " +
                                     std::to_string(seed) + (sim ? " simulated" : " centralized") + ": " + describe(r));
                  break;
                }
              }
            }
          }
        }
      }
    }
    ok = failures.empty();
    return ok ? std::to_string(circuits_total) + " circuits, " + std::to_string(runs) + " runs all equal the oracle"
              : join(failures);
  });
}

CriterionResult Conformance::ot2_truth_table() {
  return timed("ot2: 8-row truth table, 2 messages each", 1.0, [&](bool& ok) {
    std::vector<std::string> failures;
    auto chor = protocols::ot2_choreography();
    for (int row = 0; row < 8; ++row) {
      protocols::Ot2Args args{(row & 4) != 0, (row & 2) != 0, (row & 1) != 0};
      bool expected = args.select ? args.b2 : args.b1;
      for (bool sim : {false, true}) {
        auto r = sim ? choreo::run_simulated(chor, args, static_cast<std::uint64_t>(row))
                     : choreo::run_centralized(chor, args, static_cast<std::uint64_t>(row));
        auto got = held(r, "receiver");
        if (!got || *got != Value::boolean(expected)) {
          failures.push_back("row " + std::to_string(row) + ": " + describe(r));
        }
        if (r.message_count() != 2) {
          failures.push_back("row " + std::to_string(row) + ": " + std::to_string(r.message_count()) + " messages");
        }
      }
    }
    ok = failures.empty();
    return ok ? std::string("all 8 rows select correctly with exactly 2 messages") : join(failures);
  });
}

CriterionResult Conformance::lottery() {
  return timed("lottery: 100 runs with 3 servers and 4 clients, tamper detection, commit ordering", 30.0, [&](bool& ok) {
    constexpr std::size_t S = 3;
    constexpr std::size_t C = 4;
    auto servers = protocols::server_names(S);
    std::vector<std::string> failures;
    auto check_run = [&](const RunReport& r, const std::vector<std::int64_t>& secrets, const std::string& label) {
      if (!r.ok()) {
        failures.push_back(label + ": " + describe(r));
        return;
      }
      std::int64_t sum = 0;
      for (const auto& s : servers) {
        auto rho = held(r, s, 2);
        if (!rho) {
          failures.push_back(label + ": no rho at " + s);
          return;
        }
        sum = protocols::field_add(sum, protocols::field_reduce(rho->as_int()));
      }
      auto index = sum % static_cast<std::int64_t>(C);
      for (const auto& s : servers) {
        auto omega = held(r, s, 1);
        if (!omega || omega->as_int() != index) failures.push_back(label + ": omega mismatch at " + s);
      }
      auto out = held(r, "analyst", 0);
      if (!out || out->as_int() != secrets[static_cast<std::size_t>(index)]) {
        failures.push_back(label + ": analyst got " + (out ? out->to_string() : "nothing") + ", expected client " +
                           std::to_string(index));
      }
      std::string why;
      if (!lottery_ordering_holds(r, servers, why)) failures.push_back(label + ": ordering: " + why);
    };

    for (int run = 0; run < options_.lottery_runs; ++run) {
      std::mt19937_64 rng(static_cast<std::uint64_t>(run) * 7919 + 1);
      RunConfig c;
      c.example = "lottery";
      c.servers = S;
      c.clients = C;
      for (std::size_t i = 0; i < C; ++i) c.secrets.push_back(static_cast<std::int64_t>(rng() % protocols::kFieldPrime));
      check_run(simulate(build_example(c), static_cast<std::uint64_t>(run)), c.secrets, "run " + std::to_string(run));
    }
    // Fixed draws: rho (1,2,3) selects client index 2; all zero selects 0.
    for (const auto& [rho, index] : std::vector<std::pair<std::vector<std::int64_t>, std::size_t>>{{{1, 2, 3}, 2}, {{0, 0, 0}, 0}}) {
      RunConfig c;
      c.example = "lottery";
      c.servers = S;
      c.clients = C;
      c.rho = rho;
      c.secrets = default_secrets(C);
      auto r = build_example(c).centralized(5);
      auto out = held(r, "analyst", 0);
      if (!out || out->as_int() != c.secrets[index]) failures.push_back("fixed rho: analyst got " + describe(r));
    }
    // Tampering after commitment is caught by every server.
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      RunConfig c;
      c.example = "lottery";
      c.servers = S;
      c.clients = C;
      c.tamper_server = "server" + std::to_string(1 + seed % S);
      auto r = simulate(build_example(c), seed);
      auto flagged = r.endpoints_with(ErrorCode::kCommitmentFailed);
      if (flagged != servers) failures.push_back("tamper seed " + std::to_string(seed) + ": flagged " + join(flagged));
      if (held(r, "analyst", 0)) failures.push_back("tamper seed " + std::to_string(seed) + ": analyst still got a value");
    }
    ok = failures.empty();
    return ok ? std::to_string(options_.lottery_runs) +
                    " runs select the secret at index sum(rho) mod 4; tampering flagged at all 3 servers; alphas precede openings"
              : join(failures);
  });
}

CriterionResult Conformance::negative_control() {
  return timed("negative control: broken choreography is flagged StepBudgetExceeded", 10.0, [&](bool& ok) {
    RunConfig c;
    c.example = kNegativeControl;
    auto chor = build_example(c);
    std::size_t flagged = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      auto r = chor.simulated(seed);
      if (!r.endpoints_with(ErrorCode::kStepBudgetExceeded).empty()) ++flagged;
    }
    ok = flagged == 10;
    return std::to_string(flagged) + "/10 seeds flagged StepBudgetExceeded";
  });
}

CriterionResult Conformance::deadlock_freedom() {
  return timed("deadlock freedom: every example completes under 50 seeds; negative control flagged", 120.0, [&](bool& ok) {
    std::vector<std::string> failures;
    std::size_t runs = 0;
    for (const auto& config : example_configs()) {
      auto chor = build_example(config);
      for (int seed = 0; seed < options_.deadlock_seeds; ++seed) {
        auto r = simulate(chor, static_cast<std::uint64_t>(seed) + 1000);
        ++runs;
        if (!r.ok()) failures.push_back(config.example + " seed " + std::to_string(seed) + ": " + describe(r));
      }
    }
    auto control = negative_control();
    if (!control.passed) failures.push_back("negative control: " + control.detail);
    ok = failures.empty();
    return ok ? std::to_string(runs) + " simulated runs completed; " + control.detail : join(failures);
  });
}

CriterionResult Conformance::projection_equivalence() {
  return timed("projection equivalence: simulated results and branch logs equal centralized", 120.0, [&](bool& ok) {
    std::vector<std::string> failures;
    std::size_t comparisons = 0;
    for (const auto& config : example_configs()) {
      auto chor = build_example(config);
      for (int seed = 0; seed < options_.equivalence_seeds; ++seed) {
        auto central = chor.centralized(static_cast<std::uint64_t>(seed));
        auto sim = simulate(chor, static_cast<std::uint64_t>(seed));
        ++comparisons;
        std::string label = config.example + " seed " + std::to_string(seed);
        if (!central.ok() || !sim.ok()) {
          failures.push_back(label + ": run failed");
          continue;
        }
        for (const auto& name : central.census) {
          if (central.endpoints.at(name).result != sim.endpoints.at(name).result) {
            failures.push_back(label + ": result differs at " + name);
          }
          if (central.branch_log(name) != sim.branch_log(name)) failures.push_back(label + ": branch log differs at " + name);
        }
        for (auto& d : choreo::branch_disagreements(sim)) failures.push_back(label + ": " + d);
        if (central.message_count() != sim.message_count()) failures.push_back(label + ": message counts differ");
      }
    }
    ok = failures.empty();
    return ok ? std::to_string(comparisons) + " example/seed pairs agree" : join(failures);
  });
}

CriterionResult Conformance::tcp_interchangeability() {
  return timed("transport interchangeability: 3-process TCP runs equal the simulator", 30.0, [&](bool& ok) {
    if (options_.cli_path.empty()) {
      ok = false;
      return std::string("no CLI path configured");
    }
    char dir_template[] = "/tmp/choreo-tcp-XXXXXX";
    const char* dir = ::mkdtemp(dir_template);
    if (!dir) throw choreo::Error(ErrorCode::kConfigError, "cannot create a temporary directory");
    std::vector<std::string> failures;

    auto scenario = [&](const std::string& label, RunConfig config, const std::vector<std::string>& extra_args) {
      auto expected = simulate(build_example(config), config.seed);
      std::map<std::string, std::string> expected_lines;
      {
        std::istringstream lines(format_results(expected));
        std::string line;
        while (std::getline(lines, line)) expected_lines[line.substr(0, line.find(':'))] = line;
      }
      auto names = build_example(config).census().names();
      nlohmann::json book;
      for (const auto& n : names) book["locations"][n] = "127.0.0.1:" + std::to_string(free_port());
      std::string config_path = std::string(dir) + "/" + label + ".json";
      std::ofstream(config_path) << book.dump();
      std::vector<pid_t> pids;
      std::vector<std::string> outputs;
      for (const auto& n : names) {
        std::vector<std::string> argv{options_.cli_path, "run",    "--example", config.example, "--mode", "endpoint",
                                      "--role",          n,        "--config",  config_path,    "--seed", std::to_string(config.seed)};
        argv.insert(argv.end(), extra_args.begin(), extra_args.end());
        outputs.push_back(std::string(dir) + "/" + label + "-" + n + ".out");
        pids.push_back(spawn(argv, outputs.back()));
      }
      auto status = wait_all(pids, std::chrono::seconds(20));
      for (std::size_t i = 0; i < names.size(); ++i) {
        std::ifstream in(outputs[i]);
        std::string got((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        while (!got.empty() && got.back() == '\n') got.pop_back();
        if (status[i] != 0) failures.push_back(label + "/" + names[i] + " exited " + std::to_string(status[i]) + ": " + got);
        else if (got != expected_lines[names[i]]) {
          failures.push_back(label + "/" + names[i] + ": '" + got + "' vs simulator '" + expected_lines[names[i]] + "'");
        }
      }
    };

    std::string script_path = std::string(dir) + "/script.txt";
    std::ofstream(script_path) << "PUT k 5\nGET k\nGET missing\nPUT k 7\nGET k\n";
    RunConfig kvs;
    kvs.example = "kvs-enclave";
    kvs.script = protocols::parse_script(read_file(script_path));
    kvs.seed = 11;
    scenario("kvs", kvs, {"--script", script_path});

    RunConfig lot;
    lot.example = "lottery";
    lot.servers = 1;
    lot.clients = 1;
    lot.seed = 12;
    scenario("lottery", lot, {"--servers", "1", "--clients", "1"});

    ok = failures.empty();
    return ok ? std::string("kvs-enclave and lottery (3 processes each) match the simulator") : join(failures);
  });
}

CriterionResult Conformance::agreement() {
  return timed("MLV agreement: multiply-owned values encode identically at all owners", 0, [&](bool& ok) {
    ok = agreement_violations_.empty() && agreement_records_ > 0;
    if (!ok && agreement_violations_.empty()) return std::string("no agreement records were collected");
    return ok ? std::to_string(agreement_records_) + " owner encodings across " + std::to_string(agreement_reports_) +
                    " simulated runs agree"
              : join(agreement_violations_);
  });
}

}  // namespace harness
