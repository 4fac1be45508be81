#pragma once

// GMW secure evaluation of boolean circuits over xor secret shares, with
// pairwise 1-of-2 oblivious transfer for AND gates.

#include <cstdint>
#include <utility>
#include <vector>

#include "choreo/choreo_op.hpp"
#include "choreo/runtime.hpp"
#include "protocols/circuit.hpp"

namespace protocols {

/// Parity of the true entries. Throws EmptyFold on an empty sequence.
bool xor_fold(const std::vector<bool>& bits);

/// n shares whose xor is `secret`. Entries 2..n are fresh draws; entry 1
/// absorbs the secret.
std::vector<bool> gen_shares(std::size_t n, bool secret, choreo::Rng& rng);

/// `p` splits its secret across the census; each member keeps one share.
choreo::Faceted<bool> secret_share(choreo::ChoreoOp& op, const choreo::MembershipWitness& p,
                                   const choreo::Located<bool>& value);

/// Two-party 1-of-2 oblivious transfer over a census of exactly
/// {sender, receiver}: the receiver learns `pair.first` when `select` is
/// false and `pair.second` otherwise. Exactly two messages.
choreo::Located<bool> ot2(choreo::ChoreoOp& op, const choreo::MembershipWitness& sender,
                          const choreo::MembershipWitness& receiver,
                          const choreo::Located<std::pair<bool, bool>>& pair, const choreo::Located<bool>& select);

/// Shares of u AND v from shares of u and v. Both inputs must be faceted over
/// the whole census.
choreo::Faceted<bool> f_and(choreo::ChoreoOp& op, const choreo::Faceted<bool>& u, const choreo::Faceted<bool>& v);

/// Shares of the circuit output. Input wires consume their owner's stream.
choreo::Faceted<bool> gmw(choreo::ChoreoOp& op, const Circuit& circuit, const InputStreams& inputs);

/// Gathers every share at every member and xors them; n(n-1) messages.
bool reveal(choreo::ChoreoOp& op, const choreo::Faceted<bool>& shares);

struct GmwArgs {
  Circuit circuit;
  InputStreams inputs;
};

/// gmw followed by reveal; every party returns the output bit.
choreo::Choreography<GmwArgs, bool> gmw_choreography(const choreo::Census& parties);

struct Ot2Args {
  bool b1 = false;
  bool b2 = false;
  bool select = false;
};

/// Census {sender, receiver}; the receiver ends with its selected bit.
choreo::Choreography<Ot2Args, choreo::Located<bool>> ot2_choreography();

/// Modulus of the toy discrete-log group used by ot2 (2^61 - 1).
inline constexpr std::uint64_t kOtModulus = (std::uint64_t{1} << 61) - 1;

}  // namespace protocols
