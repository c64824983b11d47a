#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chaintrace/extract.hpp"

#include "support/fixtures.hpp"

#include <set>

using namespace chaintrace;
using chat::ChatMessage;
using chat::Server;

namespace {

ChatMessage msg(std::int64_t ts, std::string from, std::string to, std::string body,
                Server server = Server::Jabber) {
    return {ts, std::move(from), std::move(to), std::move(body), server};
}

} // namespace

TEST_CASE("a single mention is found with exact byte offsets") {
    const std::string body = "send to 1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa pls";
    const auto candidates = addr::extract_candidates({msg(100, "a", "b", body)});
    REQUIRE(candidates.size() == 1);
    CHECK(candidates[0].raw_text == "1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa");
    CHECK(candidates[0].span.message_id == 0);

    // offsets recomputed by an independent substring scan
    const auto begin = body.find("1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa");
    CHECK(candidates[0].span.begin == begin);
    CHECK(candidates[0].span.end == begin + 34);
    CHECK(candidates[0].span.begin == 8);
    CHECK(candidates[0].span.end == 42);
}

TEST_CASE("empty corpus yields an empty candidate list") {
    CHECK(addr::extract_candidates({}).empty());
}

TEST_CASE("context windows clip at conversation boundaries") {
    const std::string hit = "pay 1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa now";
    std::vector<ChatMessage> corpus;

    SUBCASE("3-message conversation keeps exactly 3") {
        corpus = {msg(1, "a", "b", "hello"), msg(2, "a", "b", hit), msg(3, "b", "a", "ok")};
        const auto candidates = addr::extract_candidates(corpus);
        REQUIRE(candidates.size() == 1);
        CHECK(candidates[0].context.size() == 3);
    }

    SUBCASE("a long conversation is capped at 21") {
        for (int i = 0; i < 30; ++i) corpus.push_back(msg(i, "a", "b", "chatter"));
        corpus.push_back(msg(30, "a", "b", hit));
        for (int i = 31; i < 60; ++i) corpus.push_back(msg(i, "a", "b", "chatter"));
        const auto candidates = addr::extract_candidates(corpus);
        REQUIRE(candidates.size() == 1);
        CHECK(candidates[0].context.size() == 21);
        CHECK(candidates[0].context.front().ts == 20);
        CHECK(candidates[0].context.back().ts == 40);
    }

    SUBCASE("other conversations never leak into the window") {
        // interleave an unrelated pair on the same server and the same pair on
        // another server; both are distinct conversations
        for (int i = 0; i < 15; ++i) {
            corpus.push_back(msg(2 * i, "c", "d", "noise"));
            corpus.push_back(msg(2 * i + 1, "a", "b", "related"));
        }
        corpus.push_back(msg(100, "a", "b", hit));
        corpus.push_back(msg(101, "b", "a", "reply"));               // unordered pair matches
        corpus.push_back(msg(102, "a", "b", "x", Server::RocketChat)); // different server
        const auto candidates = addr::extract_candidates(corpus);
        REQUIRE(candidates.size() == 1);
        const auto& ctx = candidates[0].context;
        CHECK(ctx.size() == 12); // 10 before + hit + 1 after
        for (const auto& m : ctx) {
            CHECK(m.body != "noise");
            CHECK(m.server == Server::Jabber);
        }
        CHECK(ctx.back().body == "reply");
    }
}

TEST_CASE("the candidate grammar is maximal-token based") {
    CHECK(addr::matches_candidate_grammar("1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa"));
    CHECK(addr::matches_candidate_grammar("3J98t1WpEZ73CNmQviecrnyiWrnqRhWNLy"));
    CHECK(addr::matches_candidate_grammar("bc1qw508d6qejxtdg4y5r3zarvary0c5xw7kv8f3t4"));
    CHECK_FALSE(addr::matches_candidate_grammar("2A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa")); // bad prefix
    CHECK_FALSE(addr::matches_candidate_grammar("1A1zP1eP5QGe"));                       // short
    CHECK_FALSE(addr::matches_candidate_grammar(""));

    // a digit glued to the front changes the token, so no hit inside it
    const auto none =
        addr::extract_candidates({msg(1, "a", "b", "x1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa")});
    CHECK(none.empty());

    // punctuation is a boundary
    const auto wrapped =
        addr::extract_candidates({msg(1, "a", "b", "(1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa).")});
    CHECK(wrapped.size() == 1);

    // two mentions in one body are two candidates
    const auto twice = addr::extract_candidates({msg(
        1, "a", "b",
        "1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa and again 1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa")});
    CHECK(twice.size() == 2);
}

TEST_CASE("dedupe groups validated mentions by canonical form") {
    fixtures::Mint mint(3);
    const std::string a = mint.next(), b = mint.next();

    std::vector<ChatMessage> corpus;
    corpus.push_back(msg(1, "x", "y", "wallet " + a));
    corpus.push_back(msg(2, "x", "y", "again " + a + " plus " + b));
    corpus.push_back(msg(3, "x", "y", "third " + a));
    const auto grouped = addr::dedupe(addr::extract_candidates(corpus));

    REQUIRE(grouped.size() == 2);
    CHECK(grouped.at(a).mentions.size() == 3);
    CHECK(grouped.at(b).mentions.size() == 1);
    // mention order preserved
    CHECK(grouped.at(a).mentions[0].span.message_id == 0);
    CHECK(grouped.at(a).mentions[1].span.message_id == 1);
    CHECK(grouped.at(a).mentions[2].span.message_id == 2);
}

TEST_CASE("extract->validate recovers planted addresses and only those") {
    // plant a mix of valid addresses and same-shape garbage with bad checksums
    fixtures::Mint mint(17);
    std::mt19937_64 rng(99);
    std::vector<ChatMessage> corpus;
    std::set<std::string> planted;
    std::size_t planted_mentions = 0;

    for (int i = 0; i < 50; ++i) {
        const std::string a = mint.next();
        planted.insert(a);
        const int repeats = 1 + int(rng() % 3);
        for (int r = 0; r < repeats; ++r) {
            corpus.push_back(msg(std::int64_t(corpus.size()), "u" + std::to_string(rng() % 5),
                                 "v", "send " + a + " thanks"));
            ++planted_mentions;
        }
    }
    const std::string b58 = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";
    for (int i = 0; i < 40; ++i) {
        std::string junk = "1";
        for (int k = 0; k < 33; ++k) junk += b58[rng() % b58.size()];
        corpus.push_back(msg(std::int64_t(corpus.size()), "w", "v", "fake " + junk));
    }

    const auto grouped = addr::dedupe(addr::extract_candidates(corpus));
    std::set<std::string> recovered;
    std::size_t mentions = 0;
    for (const auto& [canonical, group] : grouped) {
        recovered.insert(canonical);
        mentions += group.mentions.size();
    }
    CHECK(recovered == planted);           // no false accepts, nothing missed
    CHECK(mentions == planted_mentions);   // both counts exposed: uniques and mentions
}
