#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace chaintrace::chat {

enum class Server { Jabber, RocketChat };

struct ChatMessage {
    std::int64_t ts = 0; // unix seconds UTC
    std::string from_alias;
    std::string to_alias; // channel name for Rocket.Chat group messages
    std::string body;
    Server server = Server::Jabber;
};

// Line-delimited JSON records {ts, from, to, body, server?}. Messages are
// sorted by timestamp on load (stable, so file order breaks ties).
std::vector<ChatMessage> load_corpus(const std::vector<std::filesystem::path>& files);
std::vector<ChatMessage> parse_corpus(const std::string& text, const std::string& source_name);

// degree = messages sent + received, per server; ties broken by alias.
struct AliasDegree {
    std::string alias;
    std::uint64_t degree = 0;
};
std::vector<AliasDegree> degree_centrality(const std::vector<ChatMessage>& corpus, Server server);

// items x categories rating counts; every item rated by exactly `raters` raters.
struct AgreementMatrix {
    std::size_t raters = 0;
    std::vector<std::vector<std::uint32_t>> counts;
};

// Fleiss' kappa. Throws for an inconsistent matrix; the all-ratings-in-one-
// category case returns 1.0 under unanimous agreement and throws otherwise.
double fleiss_kappa(const AgreementMatrix& m);

const char* to_string(Server s) noexcept;
Server server_from_string(const std::string& name);

} // namespace chaintrace::chat
