#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chaintrace/chat.hpp"
#include "chaintrace/error.hpp"
#include "chaintrace/extract.hpp"
#include "chaintrace/worksheet.hpp"

#include "support/fixtures.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>

using namespace chaintrace;
using namespace chaintrace::chat;

namespace {

ChatMessage msg(std::int64_t ts, std::string from, std::string to, std::string body,
                Server server = Server::Jabber) {
    return {ts, std::move(from), std::move(to), std::move(body), server};
}

} // namespace

TEST_CASE("corpus jsonl parsing and sorted load") {
    const std::string text =
        R"({"ts":"2021-07-01T12:00:05Z","from":"b","to":"a","body":"second"})" "\n"
        R"({"ts":"2021-07-01T12:00:01Z","from":"a","to":"b","body":"first","server":"jabber"})" "\n"
        R"({"ts":"2021-07-01T12:00:09Z","from":"c","to":"general","body":"hi","server":"rocketchat"})" "\n";
    fixtures::TempDir tmp("corpus");
    {
        std::ofstream out(tmp.path() / "chat.jsonl");
        out << text;
    }
    const auto corpus = load_corpus({tmp.path() / "chat.jsonl"});
    REQUIRE(corpus.size() == 3);
    CHECK(corpus[0].body == "first");
    CHECK(corpus[1].body == "second");
    CHECK(corpus[2].server == Server::RocketChat);
    CHECK(corpus[0].ts == 1625140801);

    CHECK_THROWS_WITH_AS((void)parse_corpus("{\"ts\":\"bad\"}", "t"), doctest::Contains("bad"),
                         Error);
    CHECK_THROWS_AS((void)parse_corpus(R"({"ts":"2021-07-01T00:00:00Z","from":"","to":"b","body":""})", "t"),
                    Error);
}

TEST_CASE("degree centrality counts messages sent plus received, per server") {
    std::vector<ChatMessage> corpus;
    SUBCASE("single message gives both ends degree 1") {
        corpus = {msg(1, "A", "B", "hi")};
        const auto ranked = degree_centrality(corpus, Server::Jabber);
        REQUIRE(ranked.size() == 2);
        CHECK(ranked[0].alias == "A"); // tie broken lexicographically
        CHECK(ranked[0].degree == 1);
        CHECK(ranked[1].alias == "B");
        CHECK(ranked[1].degree == 1);
    }
    SUBCASE("empty corpus is empty") {
        CHECK(degree_centrality(corpus, Server::Jabber).empty());
    }
    SUBCASE("planted hub ranks first with the planted degree") {
        std::mt19937_64 rng(7);
        std::size_t hub_degree = 0;
        for (int i = 0; i < 200; ++i) {
            const std::string peer = "user" + std::to_string(rng() % 20);
            if (rng() % 3) {
                corpus.push_back(msg(i, "hub", peer, "ping"));
                ++hub_degree;
            } else {
                corpus.push_back(msg(i, peer, "user" + std::to_string(rng() % 20), "chat"));
            }
        }
        // rocketchat traffic must not leak into the jabber ranking
        for (int i = 0; i < 50; ++i)
            corpus.push_back(msg(1000 + i, "other", "general", "x", Server::RocketChat));

        const auto ranked = degree_centrality(corpus, Server::Jabber);
        REQUIRE_FALSE(ranked.empty());
        CHECK(ranked[0].alias == "hub");
        CHECK(ranked[0].degree == hub_degree);
        std::size_t total = 0;
        for (const auto& r : ranked) total += r.degree;
        CHECK(total == 2 * (corpus.size() - 50)); // sum of degrees = 2x messages
        for (const auto& r : ranked) CHECK(r.alias != "general");
    }
}

TEST_CASE("fleiss kappa: unanimous agreement across used categories is exactly 1") {
    AgreementMatrix m;
    m.raters = 3;
    m.counts = {{3, 0}, {0, 3}, {3, 0}, {0, 3}};
    CHECK(fleiss_kappa(m) == 1.0);
}

TEST_CASE("fleiss kappa matches a hand-computed 5-item matrix") {
    // items x (catA, catB), 3 raters:
    //   (3,0) (2,1) (1,2) (0,3) (2,1)
    // P_i = (sum n^2 - n) / (n(n-1)) = 1, 1/3, 1/3, 1, 1/3 -> Pbar = 3/5
    // p_A = 8/15, p_B = 7/15 -> Pe = (64+49)/225 = 113/225
    // kappa = (135/225 - 113/225) / (112/225) = 22/112 = 11/56
    AgreementMatrix m;
    m.raters = 3;
    m.counts = {{3, 0}, {2, 1}, {1, 2}, {0, 3}, {2, 1}};
    CHECK(std::abs(fleiss_kappa(m) - 11.0 / 56.0) < 1e-9);
}

TEST_CASE("fleiss kappa near zero for seeded uniform random ratings") {
    std::mt19937_64 rng(20210701);
    AgreementMatrix m;
    m.raters = 3;
    const int categories = 4;
    m.counts.assign(5000, std::vector<std::uint32_t>(categories, 0));
    for (auto& row : m.counts)
        for (std::size_t r = 0; r < m.raters; ++r) ++row[rng() % categories];
    CHECK(std::abs(fleiss_kappa(m)) < 0.05);
}

TEST_CASE("fleiss kappa degenerate and error cases") {
    AgreementMatrix everyone_same;
    everyone_same.raters = 3;
    everyone_same.counts = {{3, 0}, {3, 0}};
    CHECK(fleiss_kappa(everyone_same) == 1.0); // Pe = 1 with unanimity

    AgreementMatrix bad_row;
    bad_row.raters = 3;
    bad_row.counts = {{2, 0}};
    CHECK_THROWS_WITH_AS((void)fleiss_kappa(bad_row), doctest::Contains("sum"), Error);

    AgreementMatrix one_rater;
    one_rater.raters = 1;
    one_rater.counts = {{1}};
    CHECK_THROWS_AS((void)fleiss_kappa(one_rater), Error);
}

TEST_CASE("fleiss kappa is invariant under item and category permutation") {
    std::mt19937_64 rng(9);
    AgreementMatrix m;
    m.raters = 4;
    m.counts.assign(40, std::vector<std::uint32_t>(3, 0));
    for (auto& row : m.counts)
        for (int r = 0; r < 4; ++r) ++row[rng() % 3];
    const double base = fleiss_kappa(m);

    AgreementMatrix shuffled = m;
    for (std::size_t i = shuffled.counts.size(); i > 1; --i)
        std::swap(shuffled.counts[i - 1], shuffled.counts[rng() % i]);
    for (auto& row : shuffled.counts) std::swap(row[0], row[2]);
    CHECK(fleiss_kappa(shuffled) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("annotation sampling is deterministic, bounded, and complete at n == count") {
    fixtures::Mint mint(71);
    std::vector<ChatMessage> corpus;
    for (int i = 0; i < 30; ++i)
        corpus.push_back(msg(i, "a", "b", "wallet " + mint.next() + " please"));
    const auto candidates = addr::extract_candidates(corpus);
    REQUIRE(candidates.size() == 30);

    const auto w1 = sample_for_annotation(candidates, 10, 42);
    const auto w2 = sample_for_annotation(candidates, 10, 42);
    REQUIRE(w1.size() == 10);
    for (std::size_t i = 0; i < w1.size(); ++i) {
        CHECK(w1[i].candidate_id == w2[i].candidate_id);
        CHECK(w1[i].category.empty());
        CHECK_FALSE(w1[i].context.empty());
    }
    const auto w3 = sample_for_annotation(candidates, 10, 43);
    bool any_difference = false;
    for (std::size_t i = 0; i < w1.size(); ++i)
        any_difference |= w1[i].candidate_id != w3[i].candidate_id;
    CHECK(any_difference);

    const auto all = sample_for_annotation(candidates, candidates.size(), 42);
    CHECK(all.size() == 30);
    std::set<std::string> ids;
    for (const auto& row : all) ids.insert(row.candidate_id);
    CHECK(ids.size() == 30); // every candidate exactly once, shuffled
    CHECK(sample_for_annotation(candidates, 0, 42).empty());
    CHECK_THROWS_AS((void)sample_for_annotation(candidates, 31, 42), Error);
}

TEST_CASE("worksheets round-trip and combine into an agreement matrix") {
    fixtures::Mint mint(72);
    std::vector<ChatMessage> corpus;
    for (int i = 0; i < 5; ++i)
        corpus.push_back(msg(i, "a", "b", "addr " + mint.next()));
    const auto candidates = addr::extract_candidates(corpus);
    auto sheet = sample_for_annotation(candidates, 5, 1);

    fixtures::TempDir tmp("worksheets");
    std::vector<std::vector<WorksheetRow>> rated;
    const char* picks[3][5] = {{"salary", "salary", "ransom", "salary", "services"},
                               {"salary", "ransom", "ransom", "salary", "services"},
                               {"salary", "salary", "ransom", "ransom", "services"}};
    for (int rater = 0; rater < 3; ++rater) {
        auto copy = sheet;
        for (int i = 0; i < 5; ++i) copy[i].category = picks[rater][i];
        const auto path = tmp.path() / ("rater" + std::to_string(rater) + ".csv");
        write_worksheet(copy, path);
        rated.push_back(read_worksheet(path));
    }

    const auto matrix = matrix_from_worksheets(rated);
    CHECK(matrix.raters == 3);
    CHECK(matrix.counts.size() == 5);
    std::uint32_t total = 0;
    for (const auto& row : matrix.counts)
        for (const auto c : row) total += c;
    CHECK(total == 15);
    CHECK_NOTHROW((void)fleiss_kappa(matrix));

    // unrated rows and mismatched item sets are rejected
    auto unrated = sheet;
    CHECK_THROWS_WITH_AS((void)matrix_from_worksheets({rated[0], unrated}),
                         doctest::Contains("unrated"), Error);
    auto short_sheet = rated[1];
    short_sheet.pop_back();
    CHECK_THROWS_WITH_AS((void)matrix_from_worksheets({rated[0], short_sheet}),
                         doctest::Contains("different candidate sets"), Error);
}
