#include "choreo/choreo_op.hpp"

namespace choreo {

Roster::Roster(const SubsetWitness& s) : sup_(s.sup()) {
  members_.reserve(s.sub().size());
  for (const auto& l : s.sub()) members_.push_back(choreo::member(l, sup_));
}

Roster Roster::of(const std::vector<std::string>& names, const Census& sup) {
  if (names.empty()) return none(sup);
  return Roster(choreo::subset(census_of(names), sup));
}

std::vector<Location> Roster::locations() const {
  std::vector<Location> out;
  out.reserve(members_.size());
  for (const auto& m : members_) out.push_back(m.location());
  return out;
}

}  // namespace choreo
