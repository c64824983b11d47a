#include "chaintrace/worksheet.hpp"

#include "chaintrace/csv.hpp"
#include "chaintrace/error.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>

namespace chaintrace::chat {

std::vector<WorksheetRow> sample_for_annotation(
    const std::vector<addr::CandidateAddress>& candidates, std::size_t n, std::uint64_t seed) {
    if (n > candidates.size())
        throw data_error("sample of " + std::to_string(n) + " exceeds " +
                         std::to_string(candidates.size()) + " candidates");

    // hand-rolled Fisher-Yates on mt19937_64 raw draws; std::shuffle and the
    // distribution classes are not byte-stable across standard libraries
    std::vector<std::size_t> order(candidates.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng() % i]);

    std::vector<WorksheetRow> rows;
    rows.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& cand = candidates[order[k]];
        WorksheetRow row;
        row.candidate_id = "m" + std::to_string(cand.span.message_id) + ":" +
                           std::to_string(cand.span.begin) + "-" + std::to_string(cand.span.end);
        row.address = cand.raw_text;
        std::string context;
        for (const auto& msg : cand.context) {
            if (!context.empty()) context += " || ";
            context += msg.from_alias + ": " + msg.body;
        }
        row.context = std::move(context);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_worksheet(const std::vector<WorksheetRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write worksheet " + path.string());
    out << "candidate_id,address,context,category\n";
    for (const auto& row : rows)
        out << csv::join({row.candidate_id, row.address, row.context, row.category}) << '\n';
}

std::vector<WorksheetRow> read_worksheet(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open worksheet " + path.string());
    std::vector<WorksheetRow> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = csv::split(line);
        if (lineno == 1 && !fields.empty() && fields[0] == "candidate_id") continue;
        if (fields.size() != 4)
            throw data_error(path.filename().string() + ":" + std::to_string(lineno) +
                             ": expected candidate_id,address,context,category");
        rows.push_back({fields[0], fields[1], fields[2], fields[3]});
    }
    return rows;
}

AgreementMatrix matrix_from_worksheets(const std::vector<std::vector<WorksheetRow>>& worksheets) {
    if (worksheets.size() < 2) throw data_error("agreement needs at least 2 raters");

    // item ids must agree across raters
    std::set<std::string> ids;
    for (const auto& row : worksheets.front()) ids.insert(row.candidate_id);
    for (const auto& sheet : worksheets) {
        std::set<std::string> this_ids;
        for (const auto& row : sheet) this_ids.insert(row.candidate_id);
        if (this_ids != ids) throw data_error("worksheets rate different candidate sets");
        if (sheet.size() != ids.size()) throw data_error("duplicate candidate ids in a worksheet");
    }

    std::set<std::string> categories;
    for (const auto& sheet : worksheets)
        for (const auto& row : sheet) {
            if (row.category.empty())
                throw data_error("unrated candidate " + row.candidate_id);
            categories.insert(row.category);
        }

    std::map<std::string, std::size_t> category_index;
    for (const auto& c : categories) category_index.emplace(c, category_index.size());
    std::map<std::string, std::size_t> item_index;
    for (const auto& id : ids) item_index.emplace(id, item_index.size());

    AgreementMatrix m;
    m.raters = worksheets.size();
    m.counts.assign(ids.size(), std::vector<std::uint32_t>(categories.size(), 0));
    for (const auto& sheet : worksheets)
        for (const auto& row : sheet)
            ++m.counts[item_index.at(row.candidate_id)][category_index.at(row.category)];
    return m;
}

} // namespace chaintrace::chat
