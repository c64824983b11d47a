#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace chaintrace::addr {

enum class Encoding { Base58Check, Bech32 };
enum class ScriptKind { P2PKH, P2SH, P2WPKH, P2WSH };

// A checksum-verified payment address. `canonical` round-trips through
// decode -> encode unchanged (Bech32 canonical form is lowercase).
struct Address {
    Encoding encoding;
    ScriptKind script_kind;
    std::string canonical;
    std::vector<std::uint8_t> payload; // version byte + hash160, or witness v0 program

    friend bool operator==(const Address& a, const Address& b) {
        return a.canonical == b.canonical;
    }
    friend auto operator<=>(const Address& a, const Address& b) {
        return a.canonical <=> b.canonical;
    }
};

enum class FailedRule { Charset, Length, Checksum, UnknownVersion };

struct ValidationFailure {
    FailedRule rule;
    std::string detail;
};

using ValidationResult = std::variant<Address, ValidationFailure>;

// Checksum and length rules for Base58Check (P2PKH/P2SH) and Bech32
// witness-v0 (P2WPKH/P2WSH) addresses. Failure is a value, not a fault.
ValidationResult validate(const std::string& candidate);

// Re-encodes an address from its payload (version byte + hash for Base58Check,
// witness program for Bech32); used by the round-trip invariant and by the
// synthetic generator to mint valid addresses.
std::string encode(Encoding encoding, const std::vector<std::uint8_t>& payload);

const char* to_string(ScriptKind kind) noexcept;
const char* to_string(FailedRule rule) noexcept;

inline bool is_valid(const ValidationResult& r) { return std::holds_alternative<Address>(r); }

} // namespace chaintrace::addr
