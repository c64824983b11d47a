#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace chaintrace {

extern const char* const kBase58Alphabet; // no 0, O, I, l

bool is_base58_char(char c) noexcept;

// Raw base58 (no checksum). Decode returns nullopt on any non-alphabet char.
std::string base58_encode(const std::vector<std::uint8_t>& bytes);
std::optional<std::vector<std::uint8_t>> base58_decode(const std::string& text);

// Base58Check: payload || first 4 bytes of double-SHA256(payload).
std::string base58check_encode(const std::vector<std::uint8_t>& payload);

// Decoded payload (checksum stripped), or nullopt when the alphabet, minimum
// length, or checksum rule fails.
std::optional<std::vector<std::uint8_t>> base58check_decode(const std::string& text);

} // namespace chaintrace
