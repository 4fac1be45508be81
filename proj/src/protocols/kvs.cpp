#include "protocols/kvs.hpp"

#include <algorithm>
#include <sstream>

namespace protocols {

using namespace choreo;

namespace {

using StoreRef = std::shared_ptr<Store>;
// Put rejected by a failing backup.
constexpr Response kBackupRejected = 1;

const char* kind_name(const Request& r) { return r.kind == Request::Kind::kGet ? "get" : "put"; }

struct Session {
  ChoreoOp& op;
  const KvsArgs& args;
  Roster servers;
  Faceted<StoreRef> stores;
  std::size_t index = 0;

  bool fails(const std::string& backup) const {
    return index >= args.fail_after && args.failing_backups.count(backup) > 0;
  }
};

Faceted<StoreRef> make_stores(ChoreoOp& op, const Roster& servers) {
  return op.parallel(servers, [](const MembershipWitness&, const Unwrapper&) { return std::make_shared<Store>(); });
}

// Backup side of a Put in the one-backup variants. Returns the backup's
// status code; the store is updated only on success.
Response backup_put(const Unwrapper& un, const Request& r, const Session& s) {
  if (s.fails(un.location().name())) return kBackupRejected;
  return apply_request(r, *un.facet(s.stores));
}

// The backup acknowledges Puts to the primary; Gets need nothing.
void handle_backup(ChoreoOp& op, const Request& r, const Session& s) {
  if (r.kind != Request::Kind::kPut) return;
  auto backup = op.member("backup");
  auto ack = op.locally(backup, [&](const Unwrapper& un) { return backup_put(un, r, s); });
  op.comm(backup, op.member("primary"), ack);
}

KvsResult finish(Session& s, const std::vector<Located<Response>>& responses) {
  auto collected = s.op.locally(s.op.member("client"), [&](const Unwrapper& un) {
    std::vector<Response> out;
    for (const auto& r : responses) out.push_back(un.unwrap(r));
    return out;
  });
  auto snapshots = s.op.parallel(s.servers, [&](const MembershipWitness&, const Unwrapper& un) {
    return Store(*un.facet(s.stores));
  });
  return {std::move(collected), std::move(snapshots)};
}

Located<Response> broadcast_step(Session& s, const Located<Request>& at_primary) {
  auto& op = s.op;
  auto primary = op.member("primary");
  Request r = op.broadcast(primary, at_primary);
  op.branch(kRequestSite, kind_name(r));
  handle_backup(op, r, s);
  return op.locally(primary, [&](const Unwrapper& un) { return apply_request(r, *un.facet(s.stores)); });
}

Located<Response> enclave_step(Session& s, const Located<Request>& at_primary) {
  auto& op = s.op;
  auto shared = op.enclave(op.subset({"primary", "backup"}), [&](ChoreoOp& in) {
    Request r = in.broadcast(in.member("primary"), at_primary);
    in.branch(kRequestSite, kind_name(r));
    handle_backup(in, r, s);
    return r;
  });
  return op.locally(op.member("primary"),
                    [&](const Unwrapper& un) { return apply_request(un.unwrap(shared), *un.facet(s.stores)); });
}

Located<Response> error_handling_step(Session& s, const Located<Request>& at_primary) {
  auto& op = s.op;
  using Status = std::optional<std::string>;
  auto servers = op.subset({"primary", "backup"});
  auto to_primary = subset(census_of({"primary"}), servers.sub());
  auto primary_only = subset(census_of({"primary"}), census_of({"primary"}));

  // First enclave: the backup reports a status that both servers then own.
  auto first = op.enclave(servers, [&](ChoreoOp& in) {
    Request r = in.broadcast(in.member("primary"), at_primary);
    in.branch(kRequestSite, kind_name(r));
    Located<Status> status = in.replicated([](const CongruentUnwrapper&) { return Status{}; });
    if (r.kind == Request::Kind::kPut) {
      auto backup = in.member("backup");
      auto local = in.locally(backup, [&](const Unwrapper& un) -> Status {
        if (backup_put(un, r, s) != kPutOk) return "backup rejected put";
        return std::nullopt;
      });
      status = in.multicast(backup, in.everyone(), local);
    }
    return in.replicated(
        [&](const CongruentUnwrapper& cu) { return std::pair<Request, Status>(r, cu.unwrap(status)); });
  });
  auto outcome = op.flatten(subset(servers.sub(), servers.sub()), subset(servers.sub(), servers.sub()), first);

  // Second enclave: both servers already know the status, so no messages.
  auto second = op.enclave(servers, [&](ChoreoOp& in) {
    auto [r, error] = in.naked(outcome);
    in.branch(kBackupStatusSite, error ? "error" : "ok");
    return in.locally(in.member("primary"), [&, r = r, failed = error.has_value()](const Unwrapper& un) {
      return failed ? kDesync : apply_request(r, *un.facet(s.stores));
    });
  });
  return op.flatten(to_primary, primary_only, second);
}

Located<Response> poly_step(Session& s, const Located<Request>& at_primary, const std::vector<std::string>& backups) {
  auto& op = s.op;
  std::vector<std::string> server_names{"primary"};
  server_names.insert(server_names.end(), backups.begin(), backups.end());
  auto servers = op.subset(server_names);
  auto nested = op.enclave(servers, [&](ChoreoOp& in) {
    auto primary = in.member("primary");
    Request r = in.broadcast(primary, at_primary);
    in.branch(kRequestSite, kind_name(r));
    if (r.kind == Request::Kind::kGet) {
      return in.locally(primary, [&](const Unwrapper& un) { return apply_request(r, *un.facet(s.stores)); });
    }
    auto backup_roster = Roster::of(backups, in.census());
    auto oks = in.parallel(backup_roster, [&](const MembershipWitness& q, const Unwrapper& un) {
      if (s.fails(q.location().name())) return kBackupRejected;
      return apply_request(r, *un.facet(s.stores));
    });
    auto gathered = in.gather(backup_roster, in.only(primary), oks);
    return in.locally(primary, [&](const Unwrapper& un) {
      const auto& codes = un.unwrap(gathered).values();
      bool all_ok = std::all_of(codes.begin(), codes.end(), [](Response c) { return c == kPutOk; });
      return all_ok ? apply_request(r, *un.facet(s.stores)) : kDesync;
    });
  });
  auto only_primary = census_of({"primary"});
  return op.flatten(subset(only_primary, servers.sub()), subset(only_primary, only_primary), nested);
}

}  // namespace

Response apply_request(const Request& r, Store& store) {
  if (r.kind == Request::Kind::kPut) {
    store[r.key] = r.value;
    return kPutOk;
  }
  auto it = store.find(r.key);
  return it == store.end() ? 0 : it->second;
}

std::vector<Response> reference_responses(const std::vector<Request>& script) {
  Store model;
  std::vector<Response> out;
  for (const auto& r : script) out.push_back(apply_request(r, model));
  return out;
}

std::vector<Request> parse_script(const std::string& text) {
  std::vector<Request> out;
  std::istringstream lines(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(lines, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::string op, key, extra;
    if (!(words >> op)) continue;
    std::transform(op.begin(), op.end(), op.begin(), [](unsigned char c) { return std::toupper(c); });
    auto fail = [&](const std::string& what) {
      throw Error(ErrorCode::kConfigError, "script line " + std::to_string(number) + ": " + what);
    };
    if (!(words >> key)) fail("missing key");
    if (op == "GET") {
      if (words >> extra) fail("GET takes one argument");
      out.push_back(Request::get(key));
    } else if (op == "PUT") {
      std::int64_t value = 0;
      if (!(words >> value)) fail("PUT needs an integer value");
      if (words >> extra) fail("PUT takes two arguments");
      out.push_back(Request::put(key, value));
    } else {
      fail("unknown operation '" + op + "'");
    }
  }
  return out;
}

Choreography<KvsArgs, KvsResult> kvs_choreography(KvsVariant variant) {
  return {census_of({"client", "primary", "backup"}), [variant](ChoreoOp& op, const KvsArgs& args) {
            auto servers = Roster::of({"primary", "backup"}, op.census());
            Session s{op, args, servers, make_stores(op, servers)};
            auto client = op.member("client");
            auto primary = op.member("primary");
            std::vector<Located<Response>> responses;
            // The script length is public; its contents are read only at the client.
            for (std::size_t i = 0; i < args.script.size(); ++i) {
              s.index = i;
              auto request = op.locally(client, [&](const Unwrapper&) { return args.script[i]; });
              auto at_primary = op.comm(client, primary, request);
              Located<Response> response = variant == KvsVariant::kBroadcast ? broadcast_step(s, at_primary)
                                           : variant == KvsVariant::kEnclave ? enclave_step(s, at_primary)
                                                                             : error_handling_step(s, at_primary);
              responses.push_back(op.comm(primary, client, response));
            }
            return finish(s, responses);
          }};
}

Choreography<KvsArgs, KvsResult> kvs_poly_choreography(std::size_t backups) {
  std::vector<std::string> names{"client", "primary"};
  std::vector<std::string> backup_names;
  for (std::size_t i = 1; i <= backups; ++i) backup_names.push_back("backup" + std::to_string(i));
  names.insert(names.end(), backup_names.begin(), backup_names.end());
  return {census_of(names), [backup_names](ChoreoOp& op, const KvsArgs& args) {
            std::vector<std::string> server_names{"primary"};
            server_names.insert(server_names.end(), backup_names.begin(), backup_names.end());
            auto servers = Roster::of(server_names, op.census());
            Session s{op, args, servers, make_stores(op, servers)};
            auto client = op.member("client");
            auto primary = op.member("primary");
            std::vector<Located<Response>> responses;
            for (std::size_t i = 0; i < args.script.size(); ++i) {
              s.index = i;
              auto request = op.locally(client, [&](const Unwrapper&) { return args.script[i]; });
              auto at_primary = op.comm(client, primary, request);
              responses.push_back(op.comm(primary, client, poly_step(s, at_primary, backup_names)));
            }
            return finish(s, responses);
          }};
}

}  // namespace protocols
