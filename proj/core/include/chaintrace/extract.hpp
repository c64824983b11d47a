#pragma once

#include "chaintrace/address.hpp"
#include "chaintrace/chat.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace chaintrace::addr {

struct Span {
    std::size_t message_id = 0; // index into the loaded corpus
    std::size_t begin = 0;      // byte offsets into the message body
    std::size_t end = 0;        // exclusive
};

struct CandidateAddress {
    std::string raw_text;
    Span span;
    // up to 10 messages before and 10 after the hit, same conversation only
    std::vector<chat::ChatMessage> context;
};

// Candidate grammar: a maximal alphanumeric token that is either a base58 run
// of 26..35 chars starting with '1' or '3', or "bc1" + a bech32 charset run of
// 14..74 chars. Deliberately permissive; the checksum is the arbiter.
bool matches_candidate_grammar(const std::string& token);

// Scans every message body for grammar matches, one candidate per occurrence.
// Context windows clip at conversation boundaries, where a conversation is the
// unordered (from, to) pair on the same server.
std::vector<CandidateAddress> extract_candidates(const std::vector<chat::ChatMessage>& corpus);

struct AddressMentions {
    Address address;
    std::vector<CandidateAddress> mentions; // in input order
};

// Validated candidates grouped by canonical form. Invalid candidates are
// dropped; callers wanting failure reasons validate() individually.
std::map<std::string, AddressMentions> dedupe(const std::vector<CandidateAddress>& candidates);

} // namespace chaintrace::addr
