#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace protocols {

/// Boolean circuit tree. Input wires name their owning party; ownership is
/// checked against the census when the circuit is evaluated under GMW.
class Circuit {
 public:
  enum class Kind { kInput, kLit, kAnd, kXor };

  static Circuit input(std::string owner);
  static Circuit lit(bool bit);
  static Circuit and_gate(Circuit left, Circuit right);
  static Circuit xor_gate(Circuit left, Circuit right);

  Kind kind() const noexcept { return kind_; }
  const std::string& owner() const noexcept { return owner_; }
  bool bit() const noexcept { return bit_; }
  const Circuit& left() const { return *left_; }
  const Circuit& right() const { return *right_; }

  /// Leaves have depth 1.
  int depth() const;
  /// Number of input wires owned by each party.
  std::map<std::string, std::size_t> input_counts() const;

  /// `(xor (and (in p1) (lit 1)) (in p2))`
  std::string to_string() const;

  friend bool operator==(const Circuit& a, const Circuit& b);

 private:
  Kind kind_ = Kind::kLit;
  std::string owner_;
  bool bit_ = false;
  std::shared_ptr<const Circuit> left_;
  std::shared_ptr<const Circuit> right_;
};

/// Parses the s-expression format; throws ConfigError on malformed text.
Circuit parse_circuit(const std::string& text);

/// Per-party input streams; each input wire consumes its owner's next element
/// in left-to-right traversal order.
using InputStreams = std::map<std::string, std::vector<bool>>;

/// Plain evaluation. Throws InputExhausted when a stream runs dry.
bool eval_circuit(const Circuit& c, const InputStreams& inputs);

/// Every circuit of depth at most `max_depth` over {Lit, Input, And, Xor}
/// with inputs drawn from `parties`.
std::vector<Circuit> enumerate_circuits(const std::vector<std::string>& parties, int max_depth);

/// All assignments of input streams for `c`, in a fixed order.
std::vector<InputStreams> enumerate_inputs(const Circuit& c, const std::vector<std::string>& parties);

}  // namespace protocols
