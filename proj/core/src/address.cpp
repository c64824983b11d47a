#include "chaintrace/address.hpp"

#include "chaintrace/base58.hpp"
#include "chaintrace/bech32.hpp"

#include <algorithm>
#include <cctype>

namespace chaintrace::addr {

namespace {

bool starts_with_bc1(const std::string& s) {
    if (s.size() < 3) return false;
    const auto lc = [](char c) { return char(std::tolower(static_cast<unsigned char>(c))); };
    return lc(s[0]) == 'b' && lc(s[1]) == 'c' && s[2] == '1';
}

ValidationResult validate_base58(const std::string& candidate) {
    for (char c : candidate)
        if (!is_base58_char(c))
            return ValidationFailure{FailedRule::Charset, std::string("invalid character '") + c + "'"};
    if (candidate.size() < 26 || candidate.size() > 35)
        return ValidationFailure{FailedRule::Length, "base58 length outside 26..35"};

    auto payload = base58check_decode(candidate);
    if (!payload) return ValidationFailure{FailedRule::Checksum, "double-SHA256 checksum mismatch"};
    if (payload->size() != 21)
        return ValidationFailure{FailedRule::Length, "payload is not version byte + 20-byte hash"};

    ScriptKind kind;
    switch ((*payload)[0]) {
    case 0x00: kind = ScriptKind::P2PKH; break;
    case 0x05: kind = ScriptKind::P2SH; break;
    default:
        return ValidationFailure{FailedRule::UnknownVersion,
                                 "version byte " + std::to_string((*payload)[0])};
    }
    return Address{Encoding::Base58Check, kind, candidate, std::move(*payload)};
}

ValidationResult validate_bech32(const std::string& candidate) {
    for (std::size_t i = 3; i < candidate.size(); ++i)
        if (!bech32::is_data_char(candidate[i]))
            return ValidationFailure{FailedRule::Charset,
                                     std::string("invalid character '") + candidate[i] + "'"};
    // data part per the candidate grammar: 14..74 characters after "bc1"
    const std::size_t run = candidate.size() - 3;
    if (run < 14 || run > 74)
        return ValidationFailure{FailedRule::Length, "bech32 data run outside 14..74"};

    auto decoded = bech32::decode(candidate);
    if (!decoded || decoded->hrp != "bc")
        return ValidationFailure{FailedRule::Checksum, "bech32 checksum mismatch"};
    if (decoded->data.empty())
        return ValidationFailure{FailedRule::Length, "missing witness version"};

    const std::uint8_t version = decoded->data[0];
    if (version != 0)
        return ValidationFailure{FailedRule::UnknownVersion,
                                 "witness version " + std::to_string(version)};

    auto program = bech32::five_to_eight(
        std::vector<std::uint8_t>(decoded->data.begin() + 1, decoded->data.end()));
    if (!program) return ValidationFailure{FailedRule::Checksum, "invalid 5-bit padding"};

    ScriptKind kind;
    if (program->size() == 20) kind = ScriptKind::P2WPKH;
    else if (program->size() == 32) kind = ScriptKind::P2WSH;
    else return ValidationFailure{FailedRule::Length, "witness v0 program is not 20 or 32 bytes"};

    // canonical form is lowercase; checksum already verified case-insensitively
    std::string canonical = candidate;
    std::transform(canonical.begin(), canonical.end(), canonical.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    return Address{Encoding::Bech32, kind, std::move(canonical), std::move(*program)};
}

} // namespace

ValidationResult validate(const std::string& candidate) {
    if (candidate.empty()) return ValidationFailure{FailedRule::Length, "empty candidate"};
    if (starts_with_bc1(candidate)) return validate_bech32(candidate);
    return validate_base58(candidate);
}

std::string encode(Encoding encoding, const std::vector<std::uint8_t>& payload) {
    if (encoding == Encoding::Base58Check) return base58check_encode(payload);
    std::vector<std::uint8_t> data{0}; // witness v0 + program groups
    const auto groups = bech32::eight_to_five(payload);
    data.insert(data.end(), groups.begin(), groups.end());
    return bech32::encode("bc", data);
}

const char* to_string(ScriptKind kind) noexcept {
    switch (kind) {
    case ScriptKind::P2PKH: return "p2pkh";
    case ScriptKind::P2SH: return "p2sh";
    case ScriptKind::P2WPKH: return "p2wpkh";
    case ScriptKind::P2WSH: return "p2wsh";
    }
    return "?";
}

const char* to_string(FailedRule rule) noexcept {
    switch (rule) {
    case FailedRule::Charset: return "charset";
    case FailedRule::Length: return "length";
    case FailedRule::Checksum: return "checksum";
    case FailedRule::UnknownVersion: return "unknown-version";
    }
    return "?";
}

} // namespace chaintrace::addr
