#include "chaintrace/extract.hpp"

#include "chaintrace/base58.hpp"
#include "chaintrace/bech32.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <tuple>

namespace chaintrace::addr {

namespace {

bool is_token_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

bool base58_run(const std::string& token) {
    if (token.size() < 26 || token.size() > 35) return false;
    if (token[0] != '1' && token[0] != '3') return false;
    return std::all_of(token.begin(), token.end(), is_base58_char);
}

bool bech32_run(const std::string& token) {
    if (token.size() < 3) return false;
    const auto lc = [](char c) { return char(std::tolower(static_cast<unsigned char>(c))); };
    if (lc(token[0]) != 'b' || lc(token[1]) != 'c' || token[2] != '1') return false;
    const std::size_t run = token.size() - 3;
    if (run < 14 || run > 74) return false;
    return std::all_of(token.begin() + 3, token.end(), bech32::is_data_char);
}

// conversation key: unordered alias pair + server
using ConvKey = std::tuple<std::string, std::string, chat::Server>;

ConvKey conversation_of(const chat::ChatMessage& m) {
    const auto& [lo, hi] = std::minmax(m.from_alias, m.to_alias);
    return {lo, hi, m.server};
}

} // namespace

bool matches_candidate_grammar(const std::string& token) {
    return base58_run(token) || bech32_run(token);
}

std::vector<CandidateAddress> extract_candidates(const std::vector<chat::ChatMessage>& corpus) {
    // conversation -> ordered message ids, for context window clipping
    std::map<ConvKey, std::vector<std::size_t>> conversations;
    for (std::size_t id = 0; id < corpus.size(); ++id)
        conversations[conversation_of(corpus[id])].push_back(id);
    std::vector<std::size_t> pos_in_conv(corpus.size());
    for (const auto& [key, ids] : conversations)
        for (std::size_t k = 0; k < ids.size(); ++k) pos_in_conv[ids[k]] = k;

    std::vector<CandidateAddress> out;
    for (std::size_t id = 0; id < corpus.size(); ++id) {
        const std::string& body = corpus[id].body;
        std::size_t i = 0;
        while (i < body.size()) {
            if (!is_token_char(body[i])) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < body.size() && is_token_char(body[j])) ++j;
            const std::string token = body.substr(i, j - i);
            if (matches_candidate_grammar(token)) {
                CandidateAddress cand;
                cand.raw_text = token;
                cand.span = {id, i, j};

                const auto& conv = conversations.at(conversation_of(corpus[id]));
                const std::size_t pos = pos_in_conv[id];
                const std::size_t lo = pos >= 10 ? pos - 10 : 0;
                const std::size_t hi = std::min(conv.size(), pos + 11);
                cand.context.reserve(hi - lo);
                for (std::size_t k = lo; k < hi; ++k) cand.context.push_back(corpus[conv[k]]);

                out.push_back(std::move(cand));
            }
            i = j;
        }
    }
    return out;
}

std::map<std::string, AddressMentions> dedupe(const std::vector<CandidateAddress>& candidates) {
    std::map<std::string, AddressMentions> out;
    for (const auto& cand : candidates) {
        auto result = validate(cand.raw_text);
        if (!is_valid(result)) continue;
        auto& address = std::get<Address>(result);
        auto [it, inserted] = out.try_emplace(address.canonical);
        if (inserted) it->second.address = std::move(address);
        it->second.mentions.push_back(cand);
    }
    return out;
}

} // namespace chaintrace::addr
