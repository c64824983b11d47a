#include "chaintrace/base58.hpp"

#include "chaintrace/sha256.hpp"

#include <algorithm>
#include <array>
#include <cstring>

namespace chaintrace {

const char* const kBase58Alphabet = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";

namespace {

std::array<std::int8_t, 128> build_reverse_table() {
    std::array<std::int8_t, 128> table;
    table.fill(-1);
    for (int i = 0; i < 58; ++i) table[static_cast<unsigned char>(kBase58Alphabet[i])] = std::int8_t(i);
    return table;
}

const std::array<std::int8_t, 128> kReverse = build_reverse_table();

} // namespace

bool is_base58_char(char c) noexcept {
    const auto u = static_cast<unsigned char>(c);
    return u < 128 && kReverse[u] >= 0;
}

std::string base58_encode(const std::vector<std::uint8_t>& bytes) {
    std::size_t zeros = 0;
    while (zeros < bytes.size() && bytes[zeros] == 0) ++zeros;

    // big-endian base-256 -> base-58, digit vector grows as carries propagate
    std::vector<std::uint8_t> digits;
    digits.reserve(bytes.size() * 138 / 100 + 1);
    for (std::size_t i = zeros; i < bytes.size(); ++i) {
        unsigned carry = bytes[i];
        for (auto& d : digits) {
            carry += unsigned(d) << 8;
            d = std::uint8_t(carry % 58);
            carry /= 58;
        }
        while (carry) {
            digits.push_back(std::uint8_t(carry % 58));
            carry /= 58;
        }
    }

    std::string out(zeros, '1');
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) out += kBase58Alphabet[*it];
    return out;
}

std::optional<std::vector<std::uint8_t>> base58_decode(const std::string& text) {
    std::size_t zeros = 0;
    while (zeros < text.size() && text[zeros] == '1') ++zeros;

    std::vector<std::uint8_t> bytes;
    bytes.reserve(text.size() * 733 / 1000 + 1);
    for (std::size_t i = zeros; i < text.size(); ++i) {
        const auto u = static_cast<unsigned char>(text[i]);
        if (u >= 128 || kReverse[u] < 0) return std::nullopt;
        unsigned carry = unsigned(kReverse[u]);
        for (auto& b : bytes) {
            carry += unsigned(b) * 58;
            b = std::uint8_t(carry & 0xff);
            carry >>= 8;
        }
        while (carry) {
            bytes.push_back(std::uint8_t(carry & 0xff));
            carry >>= 8;
        }
    }

    std::vector<std::uint8_t> out(zeros, 0);
    out.insert(out.end(), bytes.rbegin(), bytes.rend());
    return out;
}

std::string base58check_encode(const std::vector<std::uint8_t>& payload) {
    std::vector<std::uint8_t> full = payload;
    const Sha256Digest check = double_sha256(payload);
    full.insert(full.end(), check.begin(), check.begin() + 4);
    return base58_encode(full);
}

std::optional<std::vector<std::uint8_t>> base58check_decode(const std::string& text) {
    auto bytes = base58_decode(text);
    if (!bytes || bytes->size() < 5) return std::nullopt;
    const std::size_t n = bytes->size() - 4;
    const Sha256Digest check = double_sha256(std::span(bytes->data(), n));
    if (!std::equal(check.begin(), check.begin() + 4, bytes->begin() + n)) return std::nullopt;
    bytes->resize(n);
    return bytes;
}

} // namespace chaintrace
