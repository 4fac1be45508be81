#include "choreo/portable.hpp"

#include <algorithm>
#include <sstream>

namespace choreo {
namespace {

constexpr std::size_t kMaxDepth = 256;

[[noreturn]] void wrong_kind(const char* expected) {
  throw Error(ErrorCode::kDecodeError, std::string("value is not a ") + expected);
}

void put_u32(Bytes& out, std::uint32_t n) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(n >> shift));
}

void encode_into(const Value& v, Bytes& out);

void put_length(Bytes& out, std::size_t n) {
  if (n > 0xFFFFFFFFu) throw Error(ErrorCode::kEncodingError, "length exceeds 32 bits");
  put_u32(out, static_cast<std::uint32_t>(n));
}

void encode_into(const Value& v, Bytes& out) {
  out.push_back(static_cast<std::uint8_t>(v.kind()));
  switch (v.kind()) {
    case Value::Kind::kUnit:
      break;
    case Value::Kind::kBool:
      out.push_back(v.as_bool() ? 1 : 0);
      break;
    case Value::Kind::kInt: {
      auto u = static_cast<std::uint64_t>(v.as_int());
      for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(u >> shift));
      break;
    }
    case Value::Kind::kText:
      put_length(out, v.as_text().size());
      out.insert(out.end(), v.as_text().begin(), v.as_text().end());
      break;
    case Value::Kind::kPair:
      encode_into(v.first(), out);
      encode_into(v.second(), out);
      break;
    case Value::Kind::kUnion:
      out.push_back(v.variant_index());
      encode_into(v.variant_value(), out);
      break;
    case Value::Kind::kSequence:
      put_length(out, v.items().size());
      for (const auto& item : v.items()) encode_into(item, out);
      break;
    case Value::Kind::kMap: {
      auto entries = v.entries();
      put_length(out, entries.size());
      for (const auto& [k, x] : entries) {
        encode_into(k, out);
        encode_into(x, out);
      }
      break;
    }
  }
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool at_end() const { return pos_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }

  std::uint8_t byte() {
    need(1);
    return bytes_[pos_++];
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t n = 0;
    for (int i = 0; i < 4; ++i) n = (n << 8) | bytes_[pos_++];
    return n;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t n = 0;
    for (int i = 0; i < 8; ++i) n = (n << 8) | bytes_[pos_++];
    return n;
  }

  std::string text(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  std::span<const std::uint8_t> slice(std::size_t from, std::size_t to) const {
    return bytes_.subspan(from, to - from);
  }

  Value value(std::size_t depth) {
    if (depth > kMaxDepth) throw Error(ErrorCode::kDecodeError, "nesting too deep");
    auto tag = byte();
    switch (tag) {
      case 0:
        return Value::unit();
      case 1: {
        auto b = byte();
        if (b > 1) throw Error(ErrorCode::kDecodeError, "bool byte must be 0 or 1");
        return Value::boolean(b == 1);
      }
      case 2:
        return Value::integer(static_cast<std::int64_t>(u64()));
      case 3:
        return Value::text(text(u32()));
      case 4: {
        auto a = value(depth + 1);
        auto b = value(depth + 1);
        return Value::pair(std::move(a), std::move(b));
      }
      case 5: {
        auto index = byte();
        return Value::variant(index, value(depth + 1));
      }
      case 6: {
        auto count = u32();
        if (count > remaining()) throw Error(ErrorCode::kDecodeError, "sequence count exceeds input");
        std::vector<Value> items;
        items.reserve(count);
        for (std::uint32_t i = 0; i < count; ++i) items.push_back(value(depth + 1));
        return Value::sequence(std::move(items));
      }
      case 7: {
        auto count = u32();
        if (count > remaining() / 2) throw Error(ErrorCode::kDecodeError, "map count exceeds input");
        std::vector<std::pair<Value, Value>> entries;
        entries.reserve(count);
        std::span<const std::uint8_t> previous_key;
        for (std::uint32_t i = 0; i < count; ++i) {
          auto start = pos_;
          auto k = value(depth + 1);
          auto key_bytes = slice(start, pos_);
          if (i > 0 && !std::lexicographical_compare(previous_key.begin(), previous_key.end(),
                                                     key_bytes.begin(), key_bytes.end())) {
            throw Error(ErrorCode::kDecodeError, "map keys not in canonical order");
          }
          previous_key = key_bytes;
          auto x = value(depth + 1);
          entries.emplace_back(std::move(k), std::move(x));
        }
        return Value::map(std::move(entries));
      }
      default:
        throw Error(ErrorCode::kDecodeError, "unknown tag " + std::to_string(tag));
    }
  }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) throw Error(ErrorCode::kDecodeError, "truncated input");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Value Value::boolean(bool b) {
  Value v;
  v.kind_ = Kind::kBool;
  v.bool_ = b;
  return v;
}

Value Value::integer(std::int64_t i) {
  Value v;
  v.kind_ = Kind::kInt;
  v.int_ = i;
  return v;
}

Value Value::text(std::string s) {
  Value v;
  v.kind_ = Kind::kText;
  v.text_ = std::move(s);
  return v;
}

Value Value::pair(Value first, Value second) {
  Value v;
  v.kind_ = Kind::kPair;
  v.children_.push_back(std::move(first));
  v.children_.push_back(std::move(second));
  return v;
}

Value Value::variant(std::uint8_t index, Value inner) {
  Value v;
  v.kind_ = Kind::kUnion;
  v.tag_ = index;
  v.children_.push_back(std::move(inner));
  return v;
}

Value Value::sequence(std::vector<Value> items) {
  Value v;
  v.kind_ = Kind::kSequence;
  v.children_ = std::move(items);
  return v;
}

Value Value::map(std::vector<std::pair<Value, Value>> entries) {
  std::vector<std::pair<Bytes, std::size_t>> keyed;
  keyed.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) keyed.emplace_back(encode_value(entries[i].first), i);
  std::sort(keyed.begin(), keyed.end());
  Value v;
  v.kind_ = Kind::kMap;
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    if (i > 0 && keyed[i].first == keyed[i - 1].first) {
      throw Error(ErrorCode::kEncodingError, "duplicate map key");
    }
    auto& e = entries[keyed[i].second];
    v.children_.push_back(std::move(e.first));
    v.children_.push_back(std::move(e.second));
  }
  return v;
}

bool Value::as_bool() const {
  if (kind_ != Kind::kBool) wrong_kind("bool");
  return bool_;
}

std::int64_t Value::as_int() const {
  if (kind_ != Kind::kInt) wrong_kind("int");
  return int_;
}

const std::string& Value::as_text() const {
  if (kind_ != Kind::kText) wrong_kind("text");
  return text_;
}

const Value& Value::first() const {
  if (kind_ != Kind::kPair) wrong_kind("pair");
  return children_[0];
}

const Value& Value::second() const {
  if (kind_ != Kind::kPair) wrong_kind("pair");
  return children_[1];
}

std::uint8_t Value::variant_index() const {
  if (kind_ != Kind::kUnion) wrong_kind("union");
  return tag_;
}

const Value& Value::variant_value() const {
  if (kind_ != Kind::kUnion) wrong_kind("union");
  return children_[0];
}

const std::vector<Value>& Value::items() const {
  if (kind_ != Kind::kSequence) wrong_kind("sequence");
  return children_;
}

std::vector<std::pair<Value, Value>> Value::entries() const {
  if (kind_ != Kind::kMap) wrong_kind("map");
  std::vector<std::pair<Value, Value>> out;
  for (std::size_t i = 0; i + 1 < children_.size(); i += 2) out.emplace_back(children_[i], children_[i + 1]);
  return out;
}

std::string Value::to_string() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::kUnit: os << "()"; break;
    case Kind::kBool: os << (bool_ ? "true" : "false"); break;
    case Kind::kInt: os << int_; break;
    case Kind::kText: os << '"' << text_ << '"'; break;
    case Kind::kPair: os << '(' << children_[0].to_string() << ", " << children_[1].to_string() << ')'; break;
    case Kind::kUnion: os << '#' << static_cast<int>(tag_) << ' ' << children_[0].to_string(); break;
    case Kind::kSequence:
      os << '[';
      for (std::size_t i = 0; i < children_.size(); ++i) os << (i ? ", " : "") << children_[i].to_string();
      os << ']';
      break;
    case Kind::kMap:
      os << '{';
      for (std::size_t i = 0; i + 1 < children_.size(); i += 2) {
        os << (i ? ", " : "") << children_[i].to_string() << ": " << children_[i + 1].to_string();
      }
      os << '}';
      break;
  }
  return os.str();
}

Bytes encode_value(const Value& v) {
  Bytes out;
  encode_into(v, out);
  return out;
}

Value decode_value(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  auto v = r.value(0);
  if (!r.at_end()) throw Error(ErrorCode::kDecodeError, "trailing bytes after value");
  return v;
}

}  // namespace choreo
