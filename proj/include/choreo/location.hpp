#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace choreo {

/// A named participant. Equality is by name.
class Location {
 public:
  explicit Location(std::string name);

  const std::string& name() const noexcept { return name_; }

  friend bool operator==(const Location&, const Location&) = default;
  friend auto operator<=>(const Location&, const Location&) = default;

 private:
  std::string name_;
};

/// Ordered, duplicate-free, non-empty list of locations. Order fixes loop and
/// Quire iteration order for every census-polymorphic operator.
class Census {
 public:
  const std::vector<Location>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  const Location& operator[](std::size_t i) const { return members_.at(i); }

  bool contains(const Location& l) const noexcept { return index_of(l).has_value(); }
  bool contains(std::string_view name) const noexcept;
  std::optional<std::size_t> index_of(const Location& l) const noexcept;
  std::optional<std::size_t> index_of(std::string_view name) const noexcept;

  /// True when every member of this census also belongs to `other`.
  bool is_subset_of(const Census& other) const noexcept;

  std::vector<std::string> names() const;
  std::string to_string() const;

  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }

  friend bool operator==(const Census&, const Census&) = default;

 private:
  friend Census census_of(const std::vector<std::string>& names);
  friend Census census_of_locations(const std::vector<Location>& locations);
  explicit Census(std::vector<Location> members) : members_(std::move(members)) {}

  std::vector<Location> members_;
};

/// Throws EmptyCensus / DuplicateLocation.
Census census_of(const std::vector<std::string>& names);
Census census_of_locations(const std::vector<Location>& locations);
inline Census census_of(std::initializer_list<std::string> names) {
  return census_of(std::vector<std::string>(names));
}

class MembershipWitness {
 public:
  const Location& location() const noexcept { return location_; }
  const Census& census() const noexcept { return census_; }
  std::size_t index() const noexcept { return index_; }

  friend bool operator==(const MembershipWitness&, const MembershipWitness&) = default;

 private:
  friend MembershipWitness member(std::string_view name, const Census& census);
  friend class SubsetWitness;
  MembershipWitness(Location l, Census c, std::size_t i)
      : location_(std::move(l)), census_(std::move(c)), index_(i) {}

  Location location_;
  Census census_;
  std::size_t index_;
};

/// Sole constructor of MembershipWitness; throws NotAMember.
MembershipWitness member(std::string_view name, const Census& census);
inline MembershipWitness member(const Location& l, const Census& census) {
  return member(l.name(), census);
}

class SubsetWitness {
 public:
  const Census& sub() const noexcept { return sub_; }
  const Census& sup() const noexcept { return sup_; }
  const std::vector<std::size_t>& index_map() const noexcept { return index_map_; }

  /// Transport a membership in `sub` to a membership in `sup`.
  MembershipWitness lift(const MembershipWitness& m) const;

  friend bool operator==(const SubsetWitness&, const SubsetWitness&) = default;

 private:
  friend SubsetWitness subset(const Census& sub, const Census& sup);
  SubsetWitness(Census sub, Census sup, std::vector<std::size_t> index_map)
      : sub_(std::move(sub)), sup_(std::move(sup)), index_map_(std::move(index_map)) {}

  Census sub_;
  Census sup_;
  std::vector<std::size_t> index_map_;
};

/// Sole constructor of SubsetWitness; throws NotASubset naming the first
/// offending location.
SubsetWitness subset(const Census& sub, const Census& sup);

/// (p in A) and (A subset of B) gives (p in B). Throws WitnessMismatch when the
/// membership census is not the subset's `sub`.
MembershipWitness compose(const MembershipWitness& m, const SubsetWitness& s);

}  // namespace choreo
