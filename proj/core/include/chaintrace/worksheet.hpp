#pragma once

#include "chaintrace/chat.hpp"
#include "chaintrace/extract.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace chaintrace::chat {

// One blind-annotation row: the candidate's context window flattened to text,
// with an empty category column for the rater to fill in.
struct WorksheetRow {
    std::string candidate_id; // "m<message_id>:<begin>-<end>", unique per occurrence
    std::string address;      // raw candidate text
    std::string context;
    std::string category;     // blank in a fresh worksheet
};

// Deterministic sample of n candidates: Fisher-Yates order under the seed.
// n == candidate count shuffles everything; n > count throws.
std::vector<WorksheetRow> sample_for_annotation(
    const std::vector<addr::CandidateAddress>& candidates, std::size_t n, std::uint64_t seed);

void write_worksheet(const std::vector<WorksheetRow>& rows, const std::filesystem::path& path);
std::vector<WorksheetRow> read_worksheet(const std::filesystem::path& path);

// Builds the items x categories matrix from one filled worksheet per rater.
// Worksheets must cover the same candidate ids, every row rated.
AgreementMatrix matrix_from_worksheets(const std::vector<std::vector<WorksheetRow>>& worksheets);

} // namespace chaintrace::chat
