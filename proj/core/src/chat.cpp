#include "chaintrace/chat.hpp"

#include "chaintrace/date.hpp"
#include "chaintrace/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace chaintrace::chat {

using nlohmann::json;

const char* to_string(Server s) noexcept {
    return s == Server::Jabber ? "jabber" : "rocketchat";
}

Server server_from_string(const std::string& name) {
    if (name == "jabber") return Server::Jabber;
    if (name == "rocketchat" || name == "rocket.chat") return Server::RocketChat;
    throw data_error("unknown chat server '" + name + "'");
}

std::vector<ChatMessage> parse_corpus(const std::string& text, const std::string& source_name) {
    std::vector<ChatMessage> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw data_error(source_name + ":" + std::to_string(lineno) + ": bad JSON: " + e.what());
        }
        ChatMessage msg;
        try {
            const auto ts = parse_timestamp(rec.at("ts").get<std::string>());
            if (!ts)
                throw data_error(source_name + ":" + std::to_string(lineno) + ": bad timestamp");
            msg.ts = *ts;
            msg.from_alias = rec.at("from").get<std::string>();
            msg.to_alias = rec.at("to").get<std::string>();
            msg.body = rec.at("body").get<std::string>();
            if (rec.contains("server")) msg.server = server_from_string(rec["server"].get<std::string>());
        } catch (const json::exception& e) {
            throw data_error(source_name + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (msg.from_alias.empty() || msg.to_alias.empty())
            throw data_error(source_name + ":" + std::to_string(lineno) + ": empty alias");
        out.push_back(std::move(msg));
    }
    return out;
}

std::vector<ChatMessage> load_corpus(const std::vector<std::filesystem::path>& files) {
    std::vector<ChatMessage> all;
    for (const auto& path : files) {
        std::ifstream in(path);
        if (!in) throw data_error("cannot open corpus file " + path.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        auto msgs = parse_corpus(buf.str(), path.filename().string());
        all.insert(all.end(), std::make_move_iterator(msgs.begin()),
                   std::make_move_iterator(msgs.end()));
    }
    std::stable_sort(all.begin(), all.end(),
                     [](const ChatMessage& a, const ChatMessage& b) { return a.ts < b.ts; });
    return all;
}

std::vector<AliasDegree> degree_centrality(const std::vector<ChatMessage>& corpus, Server server) {
    std::map<std::string, std::uint64_t> degree;
    for (const auto& m : corpus) {
        if (m.server != server) continue;
        ++degree[m.from_alias];
        ++degree[m.to_alias];
    }
    std::vector<AliasDegree> out;
    out.reserve(degree.size());
    for (auto& [alias, d] : degree) out.push_back({alias, d});
    // descending by degree, ascending by alias on ties; map order makes the
    // sort input deterministic
    std::stable_sort(out.begin(), out.end(), [](const AliasDegree& a, const AliasDegree& b) {
        return a.degree != b.degree ? a.degree > b.degree : a.alias < b.alias;
    });
    return out;
}

double fleiss_kappa(const AgreementMatrix& m) {
    const std::size_t items = m.counts.size();
    if (m.raters < 2) throw data_error("fleiss_kappa needs at least 2 raters");
    if (items == 0) throw data_error("fleiss_kappa needs at least 1 item");
    const std::size_t categories = m.counts.front().size();

    const double n = double(m.raters);
    double p_bar = 0.0;
    std::vector<double> category_share(categories, 0.0);
    for (const auto& row : m.counts) {
        if (row.size() != categories) throw data_error("ragged agreement matrix");
        std::uint64_t total = 0, sumsq = 0;
        for (std::size_t j = 0; j < categories; ++j) {
            total += row[j];
            sumsq += std::uint64_t(row[j]) * row[j];
            category_share[j] += row[j];
        }
        if (total != m.raters)
            throw data_error("agreement matrix row does not sum to rater count");
        p_bar += (double(sumsq) - n) / (n * (n - 1.0));
    }
    p_bar /= double(items);

    double pe_bar = 0.0;
    for (double share : category_share) {
        const double p = share / (double(items) * n);
        pe_bar += p * p;
    }

    if (pe_bar >= 1.0) {
        // all ratings in a single category
        if (p_bar >= 1.0) return 1.0;
        throw data_error("degenerate agreement: expected agreement is 1 without unanimity");
    }
    return (p_bar - pe_bar) / (1.0 - pe_bar);
}

} // namespace chaintrace::chat
