#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace chaintrace::bech32 {

// BIP-173 bech32 (checksum constant 1), enough for witness v0 programs.

extern const char* const kCharset;

bool is_data_char(char c) noexcept; // either case accepted

struct Decoded {
    std::string hrp;                 // lowercased
    std::vector<std::uint8_t> data;  // 5-bit groups, checksum stripped
};

// Rejects mixed case, out-of-range characters, bad length and bad checksum.
std::optional<Decoded> decode(const std::string& text);

// hrp must be lowercase; data is 5-bit groups without checksum.
std::string encode(const std::string& hrp, const std::vector<std::uint8_t>& data);

// Witness helpers: segwit address = hrp || 1 || version(1 group) || program(5-bit).
std::optional<std::vector<std::uint8_t>> five_to_eight(const std::vector<std::uint8_t>& in);
std::vector<std::uint8_t> eight_to_five(const std::vector<std::uint8_t>& in);

} // namespace chaintrace::bech32
