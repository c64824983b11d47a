#include "chaintrace/bech32.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace chaintrace::bech32 {

const char* const kCharset = "qpzry9x8gf2tvdw0s3jn54khce6mua7l";

namespace {

std::array<std::int8_t, 128> build_reverse_table() {
    std::array<std::int8_t, 128> table;
    table.fill(-1);
    for (int i = 0; i < 32; ++i) {
        table[static_cast<unsigned char>(kCharset[i])] = std::int8_t(i);
        table[static_cast<unsigned char>(std::toupper(kCharset[i]))] = std::int8_t(i);
    }
    return table;
}

const std::array<std::int8_t, 128> kReverse = build_reverse_table();

std::uint32_t polymod(const std::vector<std::uint8_t>& values) {
    static constexpr std::uint32_t gen[5] = {0x3b6a57b2, 0x26508e6d, 0x1ea119fa, 0x3d4233dd,
                                             0x2a1462b3};
    std::uint32_t chk = 1;
    for (std::uint8_t v : values) {
        const std::uint32_t top = chk >> 25;
        chk = (chk & 0x1ffffff) << 5 ^ v;
        for (int i = 0; i < 5; ++i)
            if ((top >> i) & 1) chk ^= gen[i];
    }
    return chk;
}

std::vector<std::uint8_t> expand_hrp(const std::string& hrp) {
    std::vector<std::uint8_t> out;
    out.reserve(hrp.size() * 2 + 1);
    for (char c : hrp) out.push_back(std::uint8_t(c) >> 5);
    out.push_back(0);
    for (char c : hrp) out.push_back(std::uint8_t(c) & 0x1f);
    return out;
}

} // namespace

bool is_data_char(char c) noexcept {
    const auto u = static_cast<unsigned char>(c);
    return u < 128 && kReverse[u] >= 0;
}

std::optional<Decoded> decode(const std::string& text) {
    if (text.size() < 8 || text.size() > 90) return std::nullopt;
    bool upper = false, lower = false;
    for (char c : text) {
        const auto u = static_cast<unsigned char>(c);
        if (u < 33 || u > 126) return std::nullopt;
        upper |= std::isupper(u) != 0;
        lower |= std::islower(u) != 0;
    }
    if (upper && lower) return std::nullopt;

    const auto sep = text.rfind('1');
    if (sep == std::string::npos || sep < 1 || sep + 7 > text.size()) return std::nullopt;

    Decoded out;
    out.hrp.reserve(sep);
    for (std::size_t i = 0; i < sep; ++i)
        out.hrp += char(std::tolower(static_cast<unsigned char>(text[i])));

    std::vector<std::uint8_t> values = expand_hrp(out.hrp);
    for (std::size_t i = sep + 1; i < text.size(); ++i) {
        const auto u = static_cast<unsigned char>(text[i]);
        if (u >= 128 || kReverse[u] < 0) return std::nullopt;
        values.push_back(std::uint8_t(kReverse[u]));
    }
    if (polymod(values) != 1) return std::nullopt;

    out.data.assign(values.begin() + std::ptrdiff_t(out.hrp.size() * 2 + 1), values.end() - 6);
    return out;
}

std::string encode(const std::string& hrp, const std::vector<std::uint8_t>& data) {
    std::vector<std::uint8_t> values = expand_hrp(hrp);
    values.insert(values.end(), data.begin(), data.end());
    values.insert(values.end(), 6, 0);
    const std::uint32_t mod = polymod(values) ^ 1;

    std::string out = hrp + '1';
    for (std::uint8_t v : data) out += kCharset[v];
    for (int i = 0; i < 6; ++i) out += kCharset[(mod >> (5 * (5 - i))) & 0x1f];
    return out;
}

std::optional<std::vector<std::uint8_t>> five_to_eight(const std::vector<std::uint8_t>& in) {
    std::vector<std::uint8_t> out;
    std::uint32_t acc = 0;
    int bits = 0;
    for (std::uint8_t v : in) {
        if (v >> 5) return std::nullopt;
        acc = acc << 5 | v;
        bits += 5;
        while (bits >= 8) {
            bits -= 8;
            out.push_back(std::uint8_t((acc >> bits) & 0xff));
        }
    }
    // strict BIP-173 padding: leftover bits must be zero and shorter than a group
    if (bits >= 5 || ((acc << (8 - bits)) & 0xff)) return std::nullopt;
    return out;
}

std::vector<std::uint8_t> eight_to_five(const std::vector<std::uint8_t>& in) {
    std::vector<std::uint8_t> out;
    std::uint32_t acc = 0;
    int bits = 0;
    for (std::uint8_t v : in) {
        acc = acc << 8 | v;
        bits += 8;
        while (bits >= 5) {
            bits -= 5;
            out.push_back(std::uint8_t((acc >> bits) & 0x1f));
        }
    }
    if (bits) out.push_back(std::uint8_t((acc << (5 - bits)) & 0x1f));
    return out;
}

} // namespace chaintrace::bech32
