#pragma once

// Replicated key-value store choreographies: a client, a primary, and either
// one backup (broadcast, enclave, error-handling variants) or any number of
// backups (census-polymorphic variant).

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "choreo/choreo_op.hpp"
#include "choreo/runtime.hpp"

namespace protocols {

struct Request {
  enum class Kind { kGet, kPut };

  Kind kind = Kind::kGet;
  std::string key;
  std::int64_t value = 0;

  static Request get(std::string key) { return {Kind::kGet, std::move(key), 0}; }
  static Request put(std::string key, std::int64_t value) { return {Kind::kPut, std::move(key), value}; }

  friend bool operator==(const Request&, const Request&) = default;
};

/// 0 = Put applied, -1 = replicas out of sync, otherwise the fetched value.
using Response = std::int64_t;
inline constexpr Response kPutOk = 0;
inline constexpr Response kDesync = -1;

using Store = std::map<std::string, std::int64_t>;

/// Applies one request to a store. Get of a missing key yields 0.
Response apply_request(const Request& r, Store& store);

/// Single-map reference model: the Responses a correct replicated store
/// returns for `script`.
std::vector<Response> reference_responses(const std::vector<Request>& script);

/// One `GET key` or `PUT key value` per line; blank lines and `#` comments
/// are skipped. Throws ConfigError.
std::vector<Request> parse_script(const std::string& text);

struct KvsArgs {
  std::vector<Request> script;
  /// Backups that reject Puts, without applying them, from request index
  /// `fail_after` onwards.
  std::set<std::string> failing_backups;
  std::size_t fail_after = 0;
};

/// Per-endpoint result of a session: the client's responses, and every
/// server's final store.
using KvsResult = std::tuple<choreo::Located<std::vector<Response>>, choreo::Faceted<Store>>;

enum class KvsVariant { kBroadcast, kEnclave, kErrorHandling };

/// Census {client, primary, backup}.
choreo::Choreography<KvsArgs, KvsResult> kvs_choreography(KvsVariant variant);

/// Census client, primary, backup1..backupN.
choreo::Choreography<KvsArgs, KvsResult> kvs_poly_choreography(std::size_t backups);

/// Site label of the branch recorded when servers act on a request's kind.
inline constexpr const char* kRequestSite = "request-kind";
/// Site label of the branch taken on a backup's reported status.
inline constexpr const char* kBackupStatusSite = "backup-status";

}  // namespace protocols

template <>
struct choreo::Codec<protocols::Request> {
  static Value to_value(const protocols::Request& r) {
    if (r.kind == protocols::Request::Kind::kGet) return Value::variant(0, Value::text(r.key));
    return Value::variant(1, Value::pair(Value::text(r.key), Value::integer(r.value)));
  }
  static protocols::Request from_value(const Value& v) {
    switch (v.variant_index()) {
      case 0: return protocols::Request::get(v.variant_value().as_text());
      case 1: return protocols::Request::put(v.variant_value().first().as_text(), v.variant_value().second().as_int());
      default: throw Error(ErrorCode::kDecodeError, "request variant index out of range");
    }
  }
};
