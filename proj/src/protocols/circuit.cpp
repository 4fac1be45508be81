#include "protocols/circuit.hpp"

#include <cctype>
#include <functional>

#include "choreo/error.hpp"

namespace protocols {

using choreo::Error;
using choreo::ErrorCode;

Circuit Circuit::input(std::string owner) {
  if (owner.empty()) throw Error(ErrorCode::kConfigError, "input wire needs an owner");
  Circuit c;
  c.kind_ = Kind::kInput;
  c.owner_ = std::move(owner);
  return c;
}

Circuit Circuit::lit(bool bit) {
  Circuit c;
  c.kind_ = Kind::kLit;
  c.bit_ = bit;
  return c;
}

Circuit Circuit::and_gate(Circuit left, Circuit right) {
  Circuit c;
  c.kind_ = Kind::kAnd;
  c.left_ = std::make_shared<const Circuit>(std::move(left));
  c.right_ = std::make_shared<const Circuit>(std::move(right));
  return c;
}

Circuit Circuit::xor_gate(Circuit left, Circuit right) {
  Circuit c = and_gate(std::move(left), std::move(right));
  c.kind_ = Kind::kXor;
  return c;
}

int Circuit::depth() const {
  if (kind_ == Kind::kInput || kind_ == Kind::kLit) return 1;
  return 1 + std::max(left_->depth(), right_->depth());
}

std::map<std::string, std::size_t> Circuit::input_counts() const {
  std::map<std::string, std::size_t> counts;
  std::function<void(const Circuit&)> walk = [&](const Circuit& c) {
    switch (c.kind_) {
      case Kind::kInput: ++counts[c.owner_]; break;
      case Kind::kLit: break;
      default:
        walk(*c.left_);
        walk(*c.right_);
    }
  };
  walk(*this);
  return counts;
}

std::string Circuit::to_string() const {
  switch (kind_) {
    case Kind::kInput: return "(in " + owner_ + ")";
    case Kind::kLit: return bit_ ? "(lit 1)" : "(lit 0)";
    case Kind::kAnd: return "(and " + left_->to_string() + " " + right_->to_string() + ")";
    case Kind::kXor: return "(xor " + left_->to_string() + " " + right_->to_string() + ")";
  }
  return {};
}

bool operator==(const Circuit& a, const Circuit& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case Circuit::Kind::kInput: return a.owner_ == b.owner_;
    case Circuit::Kind::kLit: return a.bit_ == b.bit_;
    default: return *a.left_ == *b.left_ && *a.right_ == *b.right_;
  }
}

namespace {

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  Circuit parse_all() {
    auto c = parse();
    skip_space();
    if (pos_ != text_.size()) fail("trailing text");
    return c;
  }

 private:
  Circuit parse() {
    expect('(');
    auto head = word();
    Circuit out;
    if (head == "in") {
      auto owner = word();
      if (owner.empty()) fail("input wire needs an owner");
      out = Circuit::input(owner);
    } else if (head == "lit") {
      auto b = word();
      if (b == "1" || b == "true") {
        out = Circuit::lit(true);
      } else if (b == "0" || b == "false") {
        out = Circuit::lit(false);
      } else {
        fail("literal must be 0 or 1");
      }
    } else if (head == "and" || head == "xor") {
      auto l = parse();
      auto r = parse();
      out = head == "and" ? Circuit::and_gate(std::move(l), std::move(r)) : Circuit::xor_gate(std::move(l), std::move(r));
    } else {
      fail("unknown gate '" + head + "'");
    }
    expect(')');
    return out;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string word() {
    skip_space();
    auto start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')') {
      ++pos_;
    }
    return text_.substr(start, pos_ - start);
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::kConfigError, "circuit text at offset " + std::to_string(pos_) + ": " + what);
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

Circuit parse_circuit(const std::string& text) { return Parser(text).parse_all(); }

bool eval_circuit(const Circuit& c, const InputStreams& inputs) {
  std::map<std::string, std::size_t> cursor;
  std::function<bool(const Circuit&)> eval = [&](const Circuit& g) -> bool {
    switch (g.kind()) {
      case Circuit::Kind::kInput: {
        auto it = inputs.find(g.owner());
        auto& i = cursor[g.owner()];
        if (it == inputs.end() || i >= it->second.size()) {
          throw Error(ErrorCode::kInputExhausted, "no input left for " + g.owner());
        }
        return it->second[i++];
      }
      case Circuit::Kind::kLit: return g.bit();
      case Circuit::Kind::kAnd: {
        bool l = eval(g.left());
        bool r = eval(g.right());
        return l && r;
      }
      case Circuit::Kind::kXor: {
        bool l = eval(g.left());
        bool r = eval(g.right());
        return l != r;
      }
    }
    return false;
  };
  return eval(c);
}

std::vector<Circuit> enumerate_circuits(const std::vector<std::string>& parties, int max_depth) {
  std::vector<Circuit> level{Circuit::lit(false), Circuit::lit(true)};
  for (const auto& p : parties) level.push_back(Circuit::input(p));
  const std::size_t leaves = level.size();
  for (int d = 2; d <= max_depth; ++d) {
    std::vector<Circuit> next(level.begin(), level.begin() + static_cast<std::ptrdiff_t>(leaves));
    for (const auto& l : level) {
      for (const auto& r : level) next.push_back(Circuit::and_gate(l, r));
    }
    for (const auto& l : level) {
      for (const auto& r : level) next.push_back(Circuit::xor_gate(l, r));
    }
    level = std::move(next);
  }
  return max_depth >= 1 ? level : std::vector<Circuit>{};
}

std::vector<InputStreams> enumerate_inputs(const Circuit& c, const std::vector<std::string>& parties) {
  auto counts = c.input_counts();
  std::size_t total = 0;
  for (const auto& [p, n] : counts) total += n;
  std::vector<InputStreams> out;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << total); ++bits) {
    InputStreams s;
    for (const auto& p : parties) s[p];
    std::size_t k = 0;
    for (const auto& [p, n] : counts) {
      for (std::size_t i = 0; i < n; ++i, ++k) s[p].push_back(((bits >> k) & 1U) != 0);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace protocols
