#include "protocols/lottery.hpp"

#include "protocols/commitment.hpp"

namespace protocols {

using namespace choreo;

namespace {

std::vector<std::string> numbered(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

}  // namespace

std::vector<std::string> server_names(std::size_t servers) { return numbered("server", servers); }
std::vector<std::string> client_names(std::size_t clients) { return numbered("client", clients); }

Choreography<LotteryArgs, LotteryResult> lottery_choreography(std::size_t n_servers, std::size_t n_clients) {
  if (n_servers == 0 || n_clients == 0) {
    throw Error(ErrorCode::kPreconditionFailed, "the lottery needs at least one server and one client");
  }
  auto servers = server_names(n_servers);
  auto clients = client_names(n_clients);
  std::vector<std::string> names{"analyst"};
  names.insert(names.end(), servers.begin(), servers.end());
  names.insert(names.end(), clients.begin(), clients.end());

  return {census_of(names), [servers, clients](ChoreoOp& op, const LotteryArgs& args) {
            if (args.secrets.size() != clients.size()) {
              throw Error(ErrorCode::kConfigError, "need one secret per client");
            }
            if (args.rho && args.rho->size() != servers.size()) {
              throw Error(ErrorCode::kConfigError, "need one fixed rho per server");
            }
            const auto C = static_cast<std::int64_t>(clients.size());
            const std::int64_t tau = args.tau.value_or(8 * C);
            if (tau <= 0) throw Error(ErrorCode::kConfigError, "tau must be positive");
            auto server_roster = Roster::of(servers, op.census());
            auto client_roster = Roster::of(clients, op.census());
            auto server_set = op.subset(servers);

            auto secret = op.parallel(client_roster, [&](const MembershipWitness& q, const Unwrapper&) {
              return field_reduce(args.secrets[*client_roster.sup().index_of(q.location()) - 1 - servers.size()]);
            });

            // Additive shares over the field, one per server.
            auto client_shares = op.parallel(client_roster, [&](const MembershipWitness&, const Unwrapper& un) {
              std::vector<FieldElement> free_shares;
              for (std::size_t i = 0; i + 1 < servers.size(); ++i) free_shares.push_back(field_rand(un.rng()));
              Quire<FieldElement> shares;
              for (std::size_t i = 0; i + 1 < servers.size(); ++i) shares.push_back(Location(servers[i]), free_shares[i]);
              shares.push_back(Location(servers.back()), field_sub(un.facet(secret), field_sum(free_shares)));
              return shares;
            });

            auto server_shares = op.fanout(server_roster, [&](ChoreoOp& op, const MembershipWitness& server) {
              return op.fanin(client_roster, op.only(server), [&](ChoreoOp& op, const MembershipWitness& client) {
                auto share = op.locally(client, [&](const Unwrapper& un) {
                  return un.facet(client_shares).at(server.location());
                });
                return op.comm(client, server, share);
              });
            });

            auto rho = op.parallel(server_roster, [&](const MembershipWitness& q, const Unwrapper& un) {
              if (args.rho) return (*args.rho)[*op.census().index_of(q.location()) - 1];
              return static_cast<std::int64_t>(uniform_below(un.rng(), static_cast<std::uint64_t>(tau)));
            });
            auto psi = op.parallel(server_roster, [&](const MembershipWitness&, const Unwrapper& un) {
              return kMinSalt + static_cast<std::int64_t>(uniform_below(un.rng(), kMaxSalt - kMinSalt));
            });
            auto alpha = op.parallel(server_roster, [&](const MembershipWitness&, const Unwrapper& un) {
              return commit(un.facet(rho), un.facet(psi));
            });

            // Each exchange completes before the next begins, so every alpha
            // is in hand before any psi or rho leaves a server.
            auto alpha_all = op.gather(server_roster, server_set, alpha);
            auto psi_all = op.gather(server_roster, server_set, psi);
            auto opened = op.parallel(server_roster, [&](const MembershipWitness& q, const Unwrapper& un) {
              auto r = un.facet(rho);
              return args.tamper_server == q.location().name() ? r + 1 : r;
            });
            auto rho_all = op.gather(server_roster, server_set, opened);

            op.parallel(server_roster, [&](const MembershipWitness& q, const Unwrapper& un) {
              const auto& alphas = un.unwrap(alpha_all);
              const auto& psis = un.unwrap(psi_all);
              const auto& rhos = un.unwrap(rho_all);
              for (const auto& s : alphas.keys()) {
                if (!verify(alphas.at(s), rhos.at(s), psis.at(s))) {
                  throw Error(ErrorCode::kCommitmentFailed,
                              q.location().name() + " rejects the opening of " + s.name());
                }
              }
            });

            auto omega = op.parallel(server_roster, [&](const MembershipWitness&, const Unwrapper& un) {
              FieldElement sum = 0;
              for (auto r : un.unwrap(rho_all).values()) sum = field_add(sum, field_reduce(r));
              return sum % C;
            });
            auto chosen = op.parallel(server_roster, [&](const MembershipWitness&, const Unwrapper& un) {
              return un.facet(server_shares).values()[static_cast<std::size_t>(un.facet(omega))];
            });
            auto analyst = op.member("analyst");
            auto all_shares = op.gather(server_roster, op.only(analyst), chosen);
            auto result = op.locally(analyst, [&](const Unwrapper& un) {
              return field_sum(un.unwrap(all_shares).values());
            });
            return LotteryResult{std::move(result), std::move(omega), std::move(rho)};
          }};
}

}  // namespace protocols
