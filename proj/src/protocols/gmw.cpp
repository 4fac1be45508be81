#include "protocols/gmw.hpp"

#include <openssl/sha.h>

#include <array>
#include <map>
#include <string>

namespace protocols {

using namespace choreo;

namespace {

constexpr std::uint64_t kOtGenerator = 37;

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % kOtModulus);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t e) {
  std::uint64_t acc = 1;
  base %= kOtModulus;
  while (e > 0) {
    if (e & 1U) acc = mul_mod(acc, base);
    base = mul_mod(base, base);
    e >>= 1;
  }
  return acc;
}

bool hash_bit(std::uint64_t shared) {
  auto bytes = encode(static_cast<std::int64_t>(shared));
  std::array<unsigned char, SHA256_DIGEST_LENGTH> digest{};
  SHA256(bytes.data(), bytes.size(), digest.data());
  return (digest[0] & 1U) != 0;
}

std::uint64_t draw_exponent(Rng& rng) { return 1 + uniform_below(rng, kOtModulus - 2); }

// Receiver-side state: both public keys, and the trapdoor of the selected
// one only.
struct OtKeys {
  std::int64_t pk0;
  std::int64_t pk1;
  std::uint64_t trapdoor;
};

using Ciphertext = std::pair<std::int64_t, bool>;

}  // namespace

bool xor_fold(const std::vector<bool>& bits) {
  if (bits.empty()) throw Error(ErrorCode::kEmptyFold, "xor of an empty sequence");
  bool acc = false;
  for (bool b : bits) acc = acc != b;
  return acc;
}

std::vector<bool> gen_shares(std::size_t n, bool secret, Rng& rng) {
  if (n == 0) throw Error(ErrorCode::kPreconditionFailed, "cannot share among zero parties");
  std::vector<bool> free_shares;
  for (std::size_t i = 1; i < n; ++i) free_shares.push_back(random_bit(rng));
  std::vector<bool> with_secret{secret};
  with_secret.insert(with_secret.end(), free_shares.begin(), free_shares.end());
  std::vector<bool> out{xor_fold(with_secret)};
  out.insert(out.end(), free_shares.begin(), free_shares.end());
  return out;
}

Faceted<bool> secret_share(ChoreoOp& op, const MembershipWitness& p, const Located<bool>& value) {
  const auto& census = op.census();
  auto shares = op.locally(p, [&](const Unwrapper& un) {
    auto bits = gen_shares(census.size(), un.unwrap(value), un.rng());
    Quire<bool> q;
    for (std::size_t i = 0; i < census.size(); ++i) q.push_back(census[i], bits[i]);
    return q;
  });
  return op.scatter(p, op.everyone(), shares);
}

Located<bool> ot2(ChoreoOp& op, const MembershipWitness& sender, const MembershipWitness& receiver,
                  const Located<std::pair<bool, bool>>& pair, const Located<bool>& select) {
  if (op.census().size() != 2 || sender.location() == receiver.location()) {
    throw Error(ErrorCode::kPreconditionFailed,
                "ot2 runs over exactly {sender, receiver}, not " + op.census().to_string());
  }
  // Both keys are generated; only the selected one keeps its exponent, so the
  // published pair does not depend on the select bit.
  auto keys = op.locally(receiver, [&](const Unwrapper& un) {
    auto x0 = draw_exponent(un.rng());
    auto x1 = draw_exponent(un.rng());
    bool s = un.unwrap(select);
    return OtKeys{static_cast<std::int64_t>(pow_mod(kOtGenerator, x0)),
                  static_cast<std::int64_t>(pow_mod(kOtGenerator, x1)), s ? x1 : x0};
  });
  auto pks = op.comm(receiver, sender, op.locally(receiver, [&](const Unwrapper& un) {
    const auto& k = un.unwrap(keys);
    return std::pair<std::int64_t, std::int64_t>(k.pk0, k.pk1);
  }));
  auto ciphertexts = op.comm(sender, receiver, op.locally(sender, [&](const Unwrapper& un) {
    const auto& [pk0, pk1] = un.unwrap(pks);
    const auto& [b0, b1] = un.unwrap(pair);
    auto seal = [&](std::int64_t pk, bool bit) {
      auto y = draw_exponent(un.rng());
      auto shared = pow_mod(static_cast<std::uint64_t>(pk), y);
      return Ciphertext{static_cast<std::int64_t>(pow_mod(kOtGenerator, y)), bit != hash_bit(shared)};
    };
    auto c0 = seal(pk0, b0);
    auto c1 = seal(pk1, b1);
    return std::pair<Ciphertext, Ciphertext>(c0, c1);
  }));
  return op.locally(receiver, [&](const Unwrapper& un) {
    const auto& k = un.unwrap(keys);
    const auto& [c0, c1] = un.unwrap(ciphertexts);
    const auto& c = un.unwrap(select) ? c1 : c0;
    return c.second != hash_bit(pow_mod(static_cast<std::uint64_t>(c.first), k.trapdoor));
  });
}

Faceted<bool> f_and(ChoreoOp& op, const Faceted<bool>& u, const Faceted<bool>& v) {
  const auto& census = op.census();
  if (u.owners() != census.members() || v.owners() != census.members()) {
    throw Error(ErrorCode::kPreconditionFailed, "f_and operands must be faceted over " + census.to_string());
  }
  auto everyone = op.everyone();
  auto masks = op.parallel(everyone, [&](const MembershipWitness&, const Unwrapper& un) {
    Quire<bool> row;
    for (const auto& l : census) row.push_back(l, random_bit(un.rng()));
    return row;
  });
  // Party j ends with b_j = xor over i != j of (a_ij xor u_i v_j).
  auto bs = op.fanout(everyone, [&](ChoreoOp& op, const MembershipWitness& p_j) {
    auto only_j = census_of_locations({p_j.location()});
    auto b_i_s = op.fanin(everyone, op.only(p_j), [&](ChoreoOp& op, const MembershipWitness& p_i) {
      if (p_i.location() == p_j.location()) {
        return op.locally(p_j, [](const Unwrapper&) { return false; });
      }
      auto bb = op.locally(p_i, [&](const Unwrapper& un) {
        bool a_ij = un.facet(masks).at(p_j.location());
        return std::pair<bool, bool>(a_ij, a_ij != un.facet(u));
      });
      auto selected = op.localize(p_j, v);
      auto pair = op.subset({p_i.location().name(), p_j.location().name()});
      auto out = op.enclave(pair, [&](ChoreoOp& two) {
        return ot2(two, two.member(p_i.location().name()), two.member(p_j.location().name()), bb, selected);
      });
      return op.flatten(subset(only_j, pair.sub()), subset(only_j, only_j), out);
    });
    return op.locally(p_j, [&](const Unwrapper& un) { return xor_fold(un.unwrap(b_i_s).values()); });
  });
  return op.parallel(everyone, [&](const MembershipWitness& p_i, const Unwrapper& un) {
    std::vector<bool> terms{un.facet(u) && un.facet(v), un.facet(bs)};
    auto row = un.facet(masks).with(p_i.location(), false);
    terms.insert(terms.end(), row.values().begin(), row.values().end());
    return xor_fold(terms);
  });
}

namespace {

Faceted<bool> gmw_at(ChoreoOp& op, const Circuit& c, const InputStreams& inputs,
                     std::map<std::string, std::size_t>& cursor) {
  switch (c.kind()) {
    case Circuit::Kind::kInput: {
      auto p = op.member(c.owner());
      auto value = op.locally(p, [&](const Unwrapper&) {
        auto it = inputs.find(c.owner());
        auto& i = cursor[c.owner()];
        if (it == inputs.end() || i >= it->second.size()) {
          throw Error(ErrorCode::kInputExhausted, "no input left for " + c.owner());
        }
        return static_cast<bool>(it->second[i++]);
      });
      return secret_share(op, p, value);
    }
    case Circuit::Kind::kLit: {
      const bool b = c.bit();
      return op.fanout(op.everyone(), [&](ChoreoOp& op, const MembershipWitness& q) {
        auto alone = op.only(q);
        auto chosen = op.enclave(alone, [&](ChoreoOp& in) {
          return in.replicated([&](const CongruentUnwrapper&) { return q.index() == 0 ? b : false; });
        });
        return op.flatten(subset(alone.sub(), alone.sub()), subset(alone.sub(), alone.sub()), chosen);
      });
    }
    case Circuit::Kind::kAnd: {
      auto l = gmw_at(op, c.left(), inputs, cursor);
      auto r = gmw_at(op, c.right(), inputs, cursor);
      return f_and(op, l, r);
    }
    case Circuit::Kind::kXor: {
      auto l = gmw_at(op, c.left(), inputs, cursor);
      auto r = gmw_at(op, c.right(), inputs, cursor);
      return op.parallel(op.everyone(), [&](const MembershipWitness&, const Unwrapper& un) {
        return un.facet(l) != un.facet(r);
      });
    }
  }
  throw Error(ErrorCode::kPreconditionFailed, "unknown gate");
}

}  // namespace

Faceted<bool> gmw(ChoreoOp& op, const Circuit& circuit, const InputStreams& inputs) {
  std::map<std::string, std::size_t> cursor;
  return gmw_at(op, circuit, inputs, cursor);
}

bool reveal(ChoreoOp& op, const Faceted<bool>& shares) {
  auto all = op.gather(op.everyone(), op.everyone(), shares);
  return xor_fold(op.naked(all).values());
}

Choreography<GmwArgs, bool> gmw_choreography(const Census& parties) {
  return {parties, [](ChoreoOp& op, const GmwArgs& args) { return reveal(op, gmw(op, args.circuit, args.inputs)); }};
}

Choreography<Ot2Args, Located<bool>> ot2_choreography() {
  return {census_of({"sender", "receiver"}), [](ChoreoOp& op, const Ot2Args& args) {
            auto s = op.member("sender");
            auto r = op.member("receiver");
            auto pair = op.locally(s, [&](const Unwrapper&) { return std::pair<bool, bool>(args.b1, args.b2); });
            auto select = op.locally(r, [&](const Unwrapper&) { return args.select; });
            return ot2(op, s, r, pair, select);
          }};
}

}  // namespace protocols
