#include "protocols/commitment.hpp"

#include <openssl/sha.h>

#include <array>
#include <utility>

namespace protocols {

std::string sha256_hex(const choreo::Bytes& data) {
  std::array<unsigned char, SHA256_DIGEST_LENGTH> digest{};
  SHA256(data.data(), data.size(), digest.data());
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(digest.size() * 2);
  for (auto b : digest) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xF]);
  }
  return out;
}

std::string commit(std::int64_t rho, std::int64_t psi) {
  return sha256_hex(choreo::encode(std::pair<std::int64_t, std::int64_t>(rho, psi)));
}

bool verify(const std::string& alpha, std::int64_t rho, std::int64_t psi) { return alpha == commit(rho, psi); }

}  // namespace protocols
