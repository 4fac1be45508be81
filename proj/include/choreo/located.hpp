#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "choreo/error.hpp"
#include "choreo/location.hpp"
#include "choreo/portable.hpp"
#include "choreo/rng.hpp"

namespace choreo {

class ChoreoOp;
struct LocatedAccess;

/// A value owned identically by a non-empty set of locations. At an endpoint
/// outside `owners()` the payload is absent; in the centralized interpreter it
/// is always present. Payloads can only be read through an Unwrapper or
/// `ChoreoOp::naked`.
template <class V>
class Located {
 public:
  using value_type = V;

  const Census& owners() const noexcept { return owners_; }
  /// Whether this projection holds the payload.
  bool is_present() const noexcept { return payload_.has_value(); }

 private:
  friend struct LocatedAccess;
  Located(Census owners, std::optional<V> payload)
      : owners_(std::move(owners)), payload_(std::move(payload)) {}

  Census owners_;
  std::optional<V> payload_;
};

/// Per-owner private values under one handle. Each owner sees only its own
/// facet; `owners()` may be empty when produced by a loop over no locations.
template <class V>
class Faceted {
 public:
  using value_type = V;

  const std::vector<Location>& owners() const noexcept { return owners_; }
  bool is_owner(const Location& l) const noexcept {
    for (const auto& o : owners_) {
      if (o == l) return true;
    }
    return false;
  }
  /// Number of facets materialized in this projection.
  std::size_t present_count() const noexcept { return facets_.size(); }

 private:
  friend struct LocatedAccess;
  Faceted(std::vector<Location> owners, std::map<std::string, V> facets)
      : owners_(std::move(owners)), facets_(std::move(facets)) {}

  std::vector<Location> owners_;
  std::map<std::string, V> facets_;
};

/// A complete map from an ordered list of locations to values. Iteration
/// follows key order.
template <class V>
class Quire {
 public:
  Quire() = default;
  Quire(std::vector<Location> keys, std::vector<V> values)
      : keys_(std::move(keys)), values_(std::move(values)) {
    if (keys_.size() != values_.size()) {
      throw Error(ErrorCode::kPreconditionFailed, "quire needs exactly one value per key");
    }
    for (std::size_t i = 0; i < keys_.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (keys_[i] == keys_[j]) {
          throw Error(ErrorCode::kDuplicateLocation, "quire key '" + keys_[i].name() + "' repeated");
        }
      }
    }
  }

  const std::vector<Location>& keys() const noexcept { return keys_; }
  const std::vector<V>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return keys_.size(); }
  bool empty() const noexcept { return keys_.empty(); }

  typename std::vector<V>::const_reference at(const Location& key) const { return values_[position(key)]; }
  typename std::vector<V>::const_reference at(std::string_view key) const { return at(Location(std::string(key))); }

  /// Copy with the entry for `key` replaced.
  Quire with(const Location& key, V value) const {
    Quire copy = *this;
    copy.values_[position(key)] = std::move(value);
    return copy;
  }

  void push_back(Location key, V value) {
    for (const auto& k : keys_) {
      if (k == key) throw Error(ErrorCode::kDuplicateLocation, "quire key '" + key.name() + "' repeated");
    }
    keys_.push_back(std::move(key));
    values_.push_back(std::move(value));
  }

  friend bool operator==(const Quire&, const Quire&) = default;

 private:
  std::size_t position(const Location& key) const {
    for (std::size_t i = 0; i < keys_.size(); ++i) {
      if (keys_[i] == key) return i;
    }
    throw Error(ErrorCode::kNotAMember, "'" + key.name() + "' is not a quire key");
  }

  std::vector<Location> keys_;
  std::vector<V> values_;
};

// Encoded as a sequence of (name, value) pairs in key order.
template <Portable V>
struct Codec<Quire<V>> {
  static Value to_value(const Quire<V>& q) {
    std::vector<Value> items;
    items.reserve(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
      items.push_back(Value::pair(Value::text(q.keys()[i].name()), Codec<V>::to_value(q.values()[i])));
    }
    return Value::sequence(std::move(items));
  }
  static Quire<V> from_value(const Value& v) {
    std::vector<Location> keys;
    std::vector<V> values;
    for (const auto& item : v.items()) {
      const auto& name = item.first().as_text();
      if (name.empty()) throw Error(ErrorCode::kDecodeError, "empty quire key");
      keys.emplace_back(name);
      values.push_back(Codec<V>::from_value(item.second()));
    }
    try {
      return Quire<V>(std::move(keys), std::move(values));
    } catch (const Error& e) {
      throw Error(ErrorCode::kDecodeError, e.what());
    }
  }
};

/// Internal constructor/peek access for the interpreters. Choreography code
/// should go through Unwrapper and the operator bundle instead.
struct LocatedAccess {
  template <class V>
  static Located<V> make(Census owners, std::optional<V> payload) {
    return Located<V>(std::move(owners), std::move(payload));
  }
  template <class V>
  static const std::optional<V>& payload(const Located<V>& l) {
    return l.payload_;
  }
  template <class V>
  static Faceted<V> make_faceted(std::vector<Location> owners, std::map<std::string, V> facets) {
    return Faceted<V>(std::move(owners), std::move(facets));
  }
  template <class V>
  static const std::map<std::string, V>& facets(const Faceted<V>& f) {
    return f.facets_;
  }
};

/// Capability to read the values owned by one location. Handed out only by
/// `locally` and `parallel`.
class Unwrapper {
 public:
  const Location& location() const noexcept { return location_; }

  template <class V>
  const V& unwrap(const Located<V>& v) const {
    const auto& payload = LocatedAccess::payload(v);
    if (!v.owners().contains(location_) || !payload) {
      throw Error(ErrorCode::kUnwrapAbsent,
                  location_.name() + " does not own a value located at " + v.owners().to_string());
    }
    return *payload;
  }

  template <class V>
  const V& facet(const Faceted<V>& f) const {
    const auto& facets = LocatedAccess::facets(f);
    auto it = facets.find(location_.name());
    if (!f.is_owner(location_) || it == facets.end()) {
      throw Error(ErrorCode::kUnwrapAbsent, location_.name() + " holds no facet of this value");
    }
    return it->second;
  }

  /// This location's private randomness stream.
  Rng& rng() const noexcept { return *rng_; }

 private:
  friend class ChoreoOp;
  Unwrapper(Location l, Rng& rng) : location_(std::move(l)), rng_(&rng) {}

  Location location_;
  Rng* rng_;
};

/// Read access for actively replicated computation: only values owned by the
/// whole census may be read, and no endpoint identity or randomness is exposed.
class CongruentUnwrapper {
 public:
  template <class V>
  const V& unwrap(const Located<V>& v) const {
    const auto& payload = LocatedAccess::payload(v);
    if (!census_.is_subset_of(v.owners()) || !payload) {
      throw Error(ErrorCode::kUnwrapAbsent, "census " + census_.to_string() +
                                                " does not own a value located at " + v.owners().to_string());
    }
    return *payload;
  }

 private:
  friend class ChoreoOp;
  explicit CongruentUnwrapper(Census c) : census_(std::move(c)) {}

  Census census_;
};

}  // namespace choreo
