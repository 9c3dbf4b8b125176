#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bitml {

using Bytes = std::vector<uint8_t>;
using Hash256 = std::array<uint8_t, 32>;
using Hash160 = std::array<uint8_t, 20>;

Hash256 sha256(std::span<const uint8_t> data);
Hash256 sha256d(std::span<const uint8_t> data);
std::array<uint8_t, 20> ripemd160(std::span<const uint8_t> data);
Hash160 hash160(std::span<const uint8_t> data);

std::string to_hex(std::span<const uint8_t> data);
// Throws std::invalid_argument on odd length or non-hex characters.
Bytes from_hex(const std::string& hex);

}  // namespace bitml
