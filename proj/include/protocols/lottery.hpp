#pragma once

// Commit-then-reveal lottery: clients secret-share values to servers over the
// field, servers jointly and fairly pick one client index, and the analyst
// learns only that client's value.

#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "choreo/choreo_op.hpp"
#include "choreo/runtime.hpp"
#include "protocols/field.hpp"

namespace protocols {

/// Salt range [2^18, 2^20).
inline constexpr std::int64_t kMinSalt = std::int64_t{1} << 18;
inline constexpr std::int64_t kMaxSalt = std::int64_t{1} << 20;

struct LotteryArgs {
  /// One secret per client, in client order.
  std::vector<FieldElement> secrets;
  /// Fixed per-server random values in server order; drawn when unset.
  std::optional<std::vector<std::int64_t>> rho;
  /// Upper bound (exclusive) for drawn random values; 8 * clients when unset.
  std::optional<std::int64_t> tau;
  /// This server opens rho + 1 instead of its committed value.
  std::optional<std::string> tamper_server;
};

/// (analyst's output, each server's omega, each server's committed rho)
using LotteryResult = std::tuple<choreo::Located<FieldElement>, choreo::Faceted<std::int64_t>,
                                 choreo::Faceted<std::int64_t>>;

std::vector<std::string> server_names(std::size_t servers);
std::vector<std::string> client_names(std::size_t clients);

/// Census analyst, server1..serverS, client1..clientC.
choreo::Choreography<LotteryArgs, LotteryResult> lottery_choreography(std::size_t servers, std::size_t clients);

}  // namespace protocols
