#pragma once

#include <cstdint>
#include <string>

#include "choreo/portable.hpp"

namespace protocols {

/// Lowercase hex SHA-256 of arbitrary bytes.
std::string sha256_hex(const choreo::Bytes& data);

/// alpha = hex SHA-256 of the portable encoding of the pair (rho, psi).
std::string commit(std::int64_t rho, std::int64_t psi);

bool verify(const std::string& alpha, std::int64_t rho, std::int64_t psi);

}  // namespace protocols
