#pragma once

// The choreographic operator bundle. A choreography is an ordinary function
// taking a ChoreoOp&; running it at an endpoint or centrally differs only in
// the Projection the bundle was built over.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "choreo/error.hpp"
#include "choreo/located.hpp"
#include "choreo/location.hpp"
#include "choreo/portable.hpp"
#include "choreo/projection.hpp"

namespace choreo {

/// A possibly empty, ordered selection of census members. Loop operators take
/// a Roster so that census-polymorphic code degrades to zero iterations.
class Roster {
 public:
  Roster(const SubsetWitness& s);  // NOLINT(google-explicit-constructor)

  static Roster none(const Census& sup) { return Roster(sup, {}); }
  static Roster of(const std::vector<std::string>& names, const Census& sup);

  const Census& sup() const noexcept { return sup_; }
  const std::vector<MembershipWitness>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  std::vector<Location> locations() const;

 private:
  Roster(Census sup, std::vector<MembershipWitness> members)
      : sup_(std::move(sup)), members_(std::move(members)) {}

  Census sup_;
  std::vector<MembershipWitness> members_;
};

namespace detail {

template <class F, class... Args>
using ResultOf = std::conditional_t<std::is_void_v<std::invoke_result_t<F, Args...>>, std::monostate,
                                    std::invoke_result_t<F, Args...>>;

template <class F, class... Args>
ResultOf<F, Args...> invoke_value(F& f, Args&&... args) {
  if constexpr (std::is_void_v<std::invoke_result_t<F, Args...>>) {
    std::invoke(f, std::forward<Args>(args)...);
    return std::monostate{};
  } else {
    return std::invoke(f, std::forward<Args>(args)...);
  }
}

template <class T>
struct LocatedInner;
template <class V>
struct LocatedInner<Located<V>> {
  using type = V;
};

}  // namespace detail

class ChoreoOp {
 public:
  ChoreoOp(Census census, Projection& projection, std::string scope = "")
      : census_(std::move(census)), projection_(&projection), scope_(std::move(scope)) {}

  ChoreoOp(const ChoreoOp&) = delete;
  ChoreoOp& operator=(const ChoreoOp&) = delete;

  const Census& census() const noexcept { return census_; }
  bool centralized() const noexcept { return projection_->centralized(); }

  MembershipWitness member(std::string_view name) const { return choreo::member(name, census_); }
  SubsetWitness subset(const std::vector<std::string>& names) const {
    return choreo::subset(census_of(names), census_);
  }
  SubsetWitness subset(const Census& sub) const { return choreo::subset(sub, census_); }
  SubsetWitness everyone() const { return choreo::subset(census_, census_); }
  /// "p and nobody else".
  SubsetWitness only(const MembershipWitness& w) const {
    check_member(w);
    return choreo::subset(census_of_locations({w.location()}), census_);
  }

  /// Runs `body` at the named location only; no messages.
  template <class F>
  auto locally(const MembershipWitness& w, F&& body) -> Located<detail::ResultOf<F, const Unwrapper&>> {
    using R = detail::ResultOf<F, const Unwrapper&>;
    check_member(w);
    next_id();
    auto owners = census_of_locations({w.location()});
    if (!projection_->plays(w.location())) return LocatedAccess::make<R>(std::move(owners), std::nullopt);
    Unwrapper un(w.location(), projection_->rng(w.location()));
    return LocatedAccess::make<R>(std::move(owners), detail::invoke_value(body, std::as_const(un)));
  }

  /// Sends `v` from `sender` to every recipient except the sender itself. The
  /// result is owned by exactly the recipients.
  template <Portable V>
  Located<V> multicast(const MembershipWitness& sender, const SubsetWitness& recipients, const Located<V>& v) {
    check_member(sender);
    check_subset(recipients);
    if (!v.owners().contains(sender.location())) {
      throw Error(ErrorCode::kNotAnOwner,
                  sender.location().name() + " does not own a value located at " + v.owners().to_string());
    }
    auto id = next_id();
    std::optional<Bytes> payload;
    if (projection_->plays(sender.location())) payload = encode(require_present(v));
    auto received = projection_->transfer(sender.location(), recipients.sub(), payload);
    std::optional<V> value;
    if (received && projection_->plays_any(recipients.sub())) value = decode<V>(*received);
    auto out = LocatedAccess::make<V>(recipients.sub(), std::move(value));
    note_agreement(id, out);
    return out;
  }

  template <Portable V>
  Located<V> comm(const MembershipWitness& sender, const MembershipWitness& recipient, const Located<V>& v) {
    return multicast(sender, only(recipient), v);
  }

  /// Multicast to the whole census followed by `naked`.
  template <Portable V>
  V broadcast(const MembershipWitness& sender, const Located<V>& v) {
    return naked(multicast(sender, everyone(), v));
  }

  /// Unwraps a value already owned by every census member. Computation on the
  /// result is replicated across the census.
  template <class V>
  V naked(const Located<V>& v) {
    if (!census_.is_subset_of(v.owners())) {
      throw Error(ErrorCode::kCensusNotOwned,
                  "census " + census_.to_string() + " is not covered by owners " + v.owners().to_string());
    }
    next_id();
    return require_present(v);
  }

  /// Runs `body` with the census narrowed to `sub`. Locations outside `sub`
  /// skip it entirely and hold an absent result.
  template <class F>
  auto enclave(const SubsetWitness& sub, F&& body) -> Located<detail::ResultOf<F, ChoreoOp&>> {
    using R = detail::ResultOf<F, ChoreoOp&>;
    check_subset(sub);
    auto id = next_id();
    if (!projection_->plays_any(sub.sub())) return LocatedAccess::make<R>(sub.sub(), std::nullopt);
    ChoreoOp inner(sub.sub(), *projection_, id);
    auto out = LocatedAccess::make<R>(sub.sub(), detail::invoke_value(body, inner));
    note_agreement(id, out);
    return out;
  }

  /// Pure computation performed identically by every census member over
  /// census-owned values.
  template <class F>
  auto replicated(F&& body) -> Located<detail::ResultOf<F, const CongruentUnwrapper&>> {
    using R = detail::ResultOf<F, const CongruentUnwrapper&>;
    auto id = next_id();
    CongruentUnwrapper un(census_);
    auto out = LocatedAccess::make<R>(census_, detail::invoke_value(body, std::as_const(un)));
    note_agreement(id, out);
    return out;
  }

  /// For each q in `qs`, in order, runs `per(op, q)` (q witnessed in this
  /// census) and keeps its result as q's facet.
  template <class F>
  auto fanout(const Roster& qs, F&& per)
      -> Faceted<typename detail::LocatedInner<std::invoke_result_t<F, ChoreoOp&, const MembershipWitness&>>::type> {
    using V = typename detail::LocatedInner<std::invoke_result_t<F, ChoreoOp&, const MembershipWitness&>>::type;
    check_roster(qs);
    next_id();
    std::map<std::string, V> facets;
    for (const auto& q : qs.members()) {
      auto r = std::invoke(per, *this, q);
      if (!r.owners().contains(q.location())) {
        throw Error(ErrorCode::kNotAnOwner, "fanout body for " + q.location().name() +
                                                " returned a value located at " + r.owners().to_string());
      }
      const auto& payload = LocatedAccess::payload(r);
      if (projection_->plays(q.location()) && payload) facets.emplace(q.location().name(), *payload);
    }
    return LocatedAccess::make_faceted<V>(qs.locations(), std::move(facets));
  }

  /// For each q in `qs`, in order, runs `per(op, q)`, whose result must be
  /// owned by `rs`; the recipients accumulate a Quire keyed by `qs`.
  template <class F>
  auto fanin(const Roster& qs, const SubsetWitness& rs, F&& per)
      -> Located<Quire<typename detail::LocatedInner<std::invoke_result_t<F, ChoreoOp&, const MembershipWitness&>>::type>> {
    using V = typename detail::LocatedInner<std::invoke_result_t<F, ChoreoOp&, const MembershipWitness&>>::type;
    check_roster(qs);
    check_subset(rs);
    auto id = next_id();
    const bool holds = projection_->plays_any(rs.sub());
    Quire<V> quire;
    for (const auto& q : qs.members()) {
      auto r = std::invoke(per, *this, q);
      if (!rs.sub().is_subset_of(r.owners())) {
        throw Error(ErrorCode::kCensusNotOwned, "fanin body for " + q.location().name() +
                                                    " returned a value located at " + r.owners().to_string());
      }
      if (holds) quire.push_back(q.location(), require_present(r));
    }
    auto out = LocatedAccess::make<Quire<V>>(rs.sub(), holds ? std::optional(std::move(quire)) : std::nullopt);
    note_agreement(id, out);
    return out;
  }

  /// Every q in `qs` runs `body(q, un)` locally; results stay private facets.
  template <class F>
  auto parallel(const Roster& qs, F&& body)
      -> Faceted<detail::ResultOf<F, const MembershipWitness&, const Unwrapper&>> {
    using V = detail::ResultOf<F, const MembershipWitness&, const Unwrapper&>;
    check_roster(qs);
    next_id();
    std::map<std::string, V> facets;
    for (const auto& q : qs.members()) {
      if (!projection_->plays(q.location())) continue;
      Unwrapper un(q.location(), projection_->rng(q.location()));
      facets.emplace(q.location().name(), detail::invoke_value(body, q, std::as_const(un)));
    }
    return LocatedAccess::make_faceted<V>(qs.locations(), std::move(facets));
  }

  /// Sends each recipient only its own leaf of a Quire held by the sender.
  template <Portable V>
  Faceted<V> scatter(const MembershipWitness& sender, const Roster& rs, const Located<Quire<V>>& v) {
    check_member(sender);
    check_roster(rs);
    if (!v.owners().contains(sender.location())) {
      throw Error(ErrorCode::kNotAnOwner,
                  sender.location().name() + " does not own a value located at " + v.owners().to_string());
    }
    next_id();
    const bool at_sender = projection_->plays(sender.location());
    std::map<std::string, V> facets;
    for (const auto& q : rs.members()) {
      const auto& to = q.location();
      if (to == sender.location()) {
        if (at_sender) facets.emplace(to.name(), require_present(v).at(to));
        continue;
      }
      std::optional<Bytes> payload;
      if (at_sender) payload = encode(require_present(v).at(to));
      auto received = projection_->transfer(sender.location(), census_of_locations({to}), payload);
      if (received && projection_->plays(to)) facets.emplace(to.name(), decode<V>(*received));
    }
    return LocatedAccess::make_faceted<V>(rs.locations(), std::move(facets));
  }

  /// Each sender multicasts its facet to `rs`; recipients assemble a Quire in
  /// `qs` order.
  template <Portable V>
  Located<Quire<V>> gather(const Roster& qs, const SubsetWitness& rs, const Faceted<V>& f) {
    return fanin(qs, rs, [&](ChoreoOp& op, const MembershipWitness& q) {
      auto mine = op.localize(q, f);
      return op.multicast(q, rs, mine);
    });
  }

  /// Views q's facet as a value located at q alone. No messages.
  template <class V>
  Located<V> localize(const MembershipWitness& q, const Faceted<V>& f) {
    check_member(q);
    next_id();
    auto owners = census_of_locations({q.location()});
    if (!projection_->plays(q.location())) return LocatedAccess::make<V>(std::move(owners), std::nullopt);
    const auto& facets = LocatedAccess::facets(f);
    auto it = facets.find(q.location().name());
    if (!f.is_owner(q.location()) || it == facets.end()) {
      throw Error(ErrorCode::kUnwrapAbsent, q.location().name() + " holds no facet of this value");
    }
    return LocatedAccess::make<V>(std::move(owners), it->second);
  }

  /// Un-nests a value located at A of a value located at B into one located
  /// at t, where t is a subset of both. No messages.
  template <class V>
  Located<V> flatten(const SubsetWitness& outer, const SubsetWitness& inner, const Located<Located<V>>& v) {
    if (outer.sup() != v.owners()) {
      throw Error(ErrorCode::kWitnessMismatch,
                  "outer witness is over " + outer.sup().to_string() + ", value is at " + v.owners().to_string());
    }
    if (outer.sub() != inner.sub()) {
      throw Error(ErrorCode::kWitnessMismatch, "flatten witnesses name different targets");
    }
    auto id = next_id();
    std::optional<V> value;
    const auto& outer_payload = LocatedAccess::payload(v);
    if (outer_payload) {
      if (inner.sup() != outer_payload->owners()) {
        throw Error(ErrorCode::kWitnessMismatch, "inner witness is over " + inner.sup().to_string() +
                                                     ", value is at " + outer_payload->owners().to_string());
      }
      const auto& inner_payload = LocatedAccess::payload(*outer_payload);
      if (inner_payload && projection_->plays_any(inner.sub())) value = *inner_payload;
    }
    auto out = LocatedAccess::make<V>(inner.sub(), std::move(value));
    note_agreement(id, out);
    return out;
  }

  /// Shrinks the owner set to `t`; dropped owners fall back to absent.
  template <class V>
  Located<V> others_forget(const SubsetWitness& t, const Located<V>& v) {
    if (t.sup() != v.owners()) {
      throw Error(ErrorCode::kWitnessMismatch,
                  "witness is over " + t.sup().to_string() + ", value is at " + v.owners().to_string());
    }
    auto id = next_id();
    const auto& payload = LocatedAccess::payload(v);
    std::optional<V> value;
    if (payload && projection_->plays_any(t.sub())) value = *payload;
    auto out = LocatedAccess::make<V>(t.sub(), std::move(value));
    note_agreement(id, out);
    return out;
  }

  /// Records a branch decision for every census member. Choreographies call
  /// this when they branch on a naked (census-wide) value.
  void branch(std::string_view site, std::string_view outcome) {
    auto id = next_id();
    projection_->record_branch(census_, std::string(site) + "@" + id, std::string(outcome));
  }

 private:
  void check_member(const MembershipWitness& w) const {
    if (w.census() != census_) {
      throw Error(ErrorCode::kWitnessMismatch, "witness for " + w.location().name() + " is over " +
                                                   w.census().to_string() + ", not " + census_.to_string());
    }
  }

  void check_subset(const SubsetWitness& s) const {
    if (s.sup() != census_) {
      throw Error(ErrorCode::kWitnessMismatch,
                  "subset witness is over " + s.sup().to_string() + ", not " + census_.to_string());
    }
  }

  void check_roster(const Roster& r) const {
    if (r.sup() != census_) {
      throw Error(ErrorCode::kWitnessMismatch,
                  "roster is over " + r.sup().to_string() + ", not " + census_.to_string());
    }
  }

  template <class V>
  static const V& require_present(const Located<V>& v) {
    const auto& payload = LocatedAccess::payload(v);
    if (!payload) {
      throw Error(ErrorCode::kUnwrapAbsent, "value located at " + v.owners().to_string() + " is absent here");
    }
    return *payload;
  }

  template <class V>
  void note_agreement(const std::string& id, const Located<V>& v) {
    if constexpr (Portable<V>) {
      if (!projection_->tracks_agreement() || v.owners().size() < 2) return;
      const auto& payload = LocatedAccess::payload(v);
      if (payload) projection_->record_agreement(id, v.owners(), encode(*payload));
    }
  }

  std::string next_id() { return scope_ + "/" + std::to_string(counter_++); }

  Census census_;
  Projection* projection_;
  std::string scope_;
  std::uint64_t counter_ = 0;
};

}  // namespace choreo
