#include "choreo/location.hpp"

#include <algorithm>
#include <set>

#include "choreo/error.hpp"

namespace choreo {

Location::Location(std::string name) : name_(std::move(name)) {
  if (name_.empty()) {
    throw Error(ErrorCode::kPreconditionFailed, "location name must be non-empty");
  }
}

bool Census::contains(std::string_view name) const noexcept { return index_of(name).has_value(); }

std::optional<std::size_t> Census::index_of(const Location& l) const noexcept {
  return index_of(std::string_view(l.name()));
}

std::optional<std::size_t> Census::index_of(std::string_view name) const noexcept {
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (members_[i].name() == name) return i;
  }
  return std::nullopt;
}

bool Census::is_subset_of(const Census& other) const noexcept {
  return std::all_of(members_.begin(), members_.end(),
                     [&](const Location& l) { return other.contains(l); });
}

std::vector<std::string> Census::names() const {
  std::vector<std::string> out;
  out.reserve(members_.size());
  for (const auto& l : members_) out.push_back(l.name());
  return out;
}

std::string Census::to_string() const {
  std::string out = "{";
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (i) out += ",";
    out += members_[i].name();
  }
  return out + "}";
}

Census census_of_locations(const std::vector<Location>& locations) {
  if (locations.empty()) throw Error(ErrorCode::kEmptyCensus, "a census needs at least one location");
  std::set<std::string> seen;
  for (const auto& l : locations) {
    if (!seen.insert(l.name()).second) {
      throw Error(ErrorCode::kDuplicateLocation, "location '" + l.name() + "' listed twice");
    }
  }
  return Census(locations);
}

Census census_of(const std::vector<std::string>& names) {
  std::vector<Location> locations;
  locations.reserve(names.size());
  for (const auto& n : names) locations.emplace_back(n);
  return census_of_locations(locations);
}

MembershipWitness member(std::string_view name, const Census& census) {
  auto idx = census.index_of(name);
  if (!idx) {
    throw Error(ErrorCode::kNotAMember,
                "'" + std::string(name) + "' is not in census " + census.to_string());
  }
  return MembershipWitness(census[*idx], census, *idx);
}

MembershipWitness SubsetWitness::lift(const MembershipWitness& m) const {
  if (m.census() != sub_) {
    throw Error(ErrorCode::kWitnessMismatch, "membership census " + m.census().to_string() +
                                                 " is not the subset " + sub_.to_string());
  }
  return MembershipWitness(m.location(), sup_, index_map_.at(m.index()));
}

SubsetWitness subset(const Census& sub, const Census& sup) {
  std::vector<std::size_t> index_map;
  index_map.reserve(sub.size());
  for (const auto& l : sub) {
    auto idx = sup.index_of(l);
    if (!idx) {
      throw Error(ErrorCode::kNotASubset,
                  "'" + l.name() + "' of " + sub.to_string() + " is not in " + sup.to_string());
    }
    index_map.push_back(*idx);
  }
  return SubsetWitness(sub, sup, std::move(index_map));
}

MembershipWitness compose(const MembershipWitness& m, const SubsetWitness& s) { return s.lift(m); }

}  // namespace choreo
