#pragma once

// Canonical, self-describing byte encoding for everything that crosses the
// wire. Layout (all integers big-endian):
//   0 unit | 1 bool (1 byte 0/1) | 2 int64 (8 bytes, two's complement)
//   3 text (u32 length + bytes) | 4 pair (two encodings)
//   5 union (u8 variant index + encoding) | 6 sequence (u32 count + encodings)
//   7 map (u32 count + key/value encodings sorted by key encoding)

#include <concepts>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "choreo/error.hpp"

namespace choreo {

using Bytes = std::vector<std::uint8_t>;

class Value {
 public:
  enum class Kind : std::uint8_t {
    kUnit = 0,
    kBool = 1,
    kInt = 2,
    kText = 3,
    kPair = 4,
    kUnion = 5,
    kSequence = 6,
    kMap = 7,
  };

  Value() = default;  // unit

  static Value unit() { return Value(); }
  static Value boolean(bool b);
  static Value integer(std::int64_t i);
  static Value text(std::string s);
  static Value pair(Value first, Value second);
  static Value variant(std::uint8_t index, Value inner);
  static Value sequence(std::vector<Value> items);
  /// Entries are put in canonical (encoded-key) order; duplicate keys throw
  /// EncodingError.
  static Value map(std::vector<std::pair<Value, Value>> entries);

  Kind kind() const noexcept { return kind_; }
  bool as_bool() const;
  std::int64_t as_int() const;
  const std::string& as_text() const;
  const Value& first() const;
  const Value& second() const;
  std::uint8_t variant_index() const;
  const Value& variant_value() const;
  const std::vector<Value>& items() const;
  std::vector<std::pair<Value, Value>> entries() const;

  /// Human-readable rendering used by the CLI and report files.
  std::string to_string() const;

  friend bool operator==(const Value&, const Value&) = default;

 private:
  Kind kind_ = Kind::kUnit;
  bool bool_ = false;
  std::int64_t int_ = 0;
  std::uint8_t tag_ = 0;
  std::string text_;
  // pair: 2 children; union: 1 child; sequence: items; map: k0 v0 k1 v1 ...
  std::vector<Value> children_;
};

Bytes encode_value(const Value& v);
/// Rejects truncated input, trailing bytes, unknown tags, and non-canonical
/// maps with DecodeError.
Value decode_value(std::span<const std::uint8_t> bytes);

// Codec<T> maps a host type to and from Value. Specialize it to make a type
// communicable.
template <class T, class = void>
struct Codec;

template <class T>
concept Portable = requires(const T& t, const Value& v) {
  { Codec<T>::to_value(t) } -> std::same_as<Value>;
  { Codec<T>::from_value(v) } -> std::same_as<T>;
};

template <>
struct Codec<std::monostate> {
  static Value to_value(const std::monostate&) { return Value::unit(); }
  static std::monostate from_value(const Value& v) {
    if (v.kind() != Value::Kind::kUnit) throw Error(ErrorCode::kDecodeError, "expected unit");
    return {};
  }
};

template <>
struct Codec<bool> {
  static Value to_value(const bool& b) { return Value::boolean(b); }
  static bool from_value(const Value& v) { return v.as_bool(); }
};

template <class T>
struct Codec<T, std::enable_if_t<std::is_integral_v<T> && !std::is_same_v<T, bool> &&
                                 !std::is_same_v<T, char>>> {
  static Value to_value(const T& i) { return Value::integer(static_cast<std::int64_t>(i)); }
  static T from_value(const Value& v) { return static_cast<T>(v.as_int()); }
};

template <>
struct Codec<std::string> {
  static Value to_value(const std::string& s) { return Value::text(s); }
  static std::string from_value(const Value& v) { return v.as_text(); }
};

template <Portable A, Portable B>
struct Codec<std::pair<A, B>> {
  static Value to_value(const std::pair<A, B>& p) {
    return Value::pair(Codec<A>::to_value(p.first), Codec<B>::to_value(p.second));
  }
  static std::pair<A, B> from_value(const Value& v) {
    return {Codec<A>::from_value(v.first()), Codec<B>::from_value(v.second())};
  }
};

template <Portable T>
struct Codec<std::optional<T>> {
  static Value to_value(const std::optional<T>& o) {
    return o ? Value::variant(1, Codec<T>::to_value(*o)) : Value::variant(0, Value::unit());
  }
  static std::optional<T> from_value(const Value& v) {
    switch (v.variant_index()) {
      case 0: return std::nullopt;
      case 1: return Codec<T>::from_value(v.variant_value());
      default: throw Error(ErrorCode::kDecodeError, "optional variant index out of range");
    }
  }
};

template <Portable T>
struct Codec<std::vector<T>> {
  static Value to_value(const std::vector<T>& xs) {
    std::vector<Value> items;
    items.reserve(xs.size());
    for (const auto& x : xs) items.push_back(Codec<T>::to_value(x));
    return Value::sequence(std::move(items));
  }
  static std::vector<T> from_value(const Value& v) {
    std::vector<T> out;
    for (const auto& item : v.items()) out.push_back(Codec<T>::from_value(item));
    return out;
  }
};

template <Portable K, Portable V>
struct Codec<std::map<K, V>> {
  static Value to_value(const std::map<K, V>& m) {
    std::vector<std::pair<Value, Value>> entries;
    entries.reserve(m.size());
    for (const auto& [k, v] : m) entries.emplace_back(Codec<K>::to_value(k), Codec<V>::to_value(v));
    return Value::map(std::move(entries));
  }
  static std::map<K, V> from_value(const Value& v) {
    std::map<K, V> out;
    for (const auto& [k, x] : v.entries()) out.emplace(Codec<K>::from_value(k), Codec<V>::from_value(x));
    return out;
  }
};

template <Portable T>
Value to_value(const T& t) {
  return Codec<T>::to_value(t);
}

template <Portable T>
T from_value(const Value& v) {
  return Codec<T>::from_value(v);
}

template <Portable T>
Bytes encode(const T& t) {
  return encode_value(Codec<T>::to_value(t));
}

template <Portable T>
T decode(std::span<const std::uint8_t> bytes) {
  return Codec<T>::from_value(decode_value(bytes));
}

}  // namespace choreo
