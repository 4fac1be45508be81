#pragma once

#include <tuple>
#include <variant>

#include "choreo/located.hpp"
#include "choreo/portable.hpp"

namespace choreo {

/// How a choreography result looks from one endpoint, as a comparable Value.
/// Located and Faceted values render as #1 payload when the endpoint holds
/// them and #0 () otherwise; plain values render as themselves.
template <class T>
struct EndpointView {
  static Value view(const T& t, const Location&)
    requires Portable<T>
  {
    return to_value(t);
  }
};

template <class T>
concept Viewable = requires(const T& t, const Location& l) {
  { EndpointView<T>::view(t, l) } -> std::same_as<Value>;
};

template <class V>
struct EndpointView<Located<V>> {
  static Value view(const Located<V>& v, const Location& at) {
    const auto& payload = LocatedAccess::payload(v);
    if (!v.owners().contains(at) || !payload) return Value::variant(0, Value::unit());
    return Value::variant(1, EndpointView<V>::view(*payload, at));
  }
};

template <class V>
struct EndpointView<Faceted<V>> {
  static Value view(const Faceted<V>& f, const Location& at) {
    const auto& facets = LocatedAccess::facets(f);
    auto it = facets.find(at.name());
    if (!f.is_owner(at) || it == facets.end()) return Value::variant(0, Value::unit());
    return Value::variant(1, EndpointView<V>::view(it->second, at));
  }
};

template <class... Ts>
struct EndpointView<std::tuple<Ts...>> {
  static Value view(const std::tuple<Ts...>& t, const Location& at) {
    std::vector<Value> items;
    std::apply([&](const auto&... xs) { (items.push_back(EndpointView<std::decay_t<decltype(xs)>>::view(xs, at)), ...); },
               t);
    return Value::sequence(std::move(items));
  }
};

template <class T>
Value view_at(const T& t, const Location& at) {
  return EndpointView<T>::view(t, at);
}

}  // namespace choreo
