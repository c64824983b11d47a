#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

namespace chaintrace {

using Sha256Digest = std::array<std::uint8_t, 32>;

Sha256Digest sha256(std::span<const std::uint8_t> data);
Sha256Digest sha256(const std::string& data);

// sha256(sha256(data)); the Base58Check checksum is the first 4 bytes of this.
Sha256Digest double_sha256(std::span<const std::uint8_t> data);

std::string hex_digest(const Sha256Digest& d);

} // namespace chaintrace
