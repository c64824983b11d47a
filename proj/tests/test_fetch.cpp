#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chaintrace/error.hpp"
#include "chaintrace/fetch.hpp"

#include "support/fixtures.hpp"

#include <httplib.h>

#include <atomic>
#include <fstream>
#include <thread>

using namespace chaintrace;
using fixtures::BTC;

namespace {

// tiny fixture service: a map of address -> response body, counting hits
struct FixtureServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::atomic<int> hits{0};

    explicit FixtureServer(std::map<std::string, std::pair<int, std::string>> responses) {
        server.Get(R"(/address/(.+))", [this, responses = std::move(responses)](
                                           const httplib::Request& req, httplib::Response& res) {
            ++hits;
            const auto it = responses.find(req.matches[1]);
            if (it == responses.end()) {
                res.status = 404;
                res.set_content("no such address", "text/plain");
                return;
            }
            res.status = it->second.first;
            res.set_content(it->second.second, "application/jsonl");
        });
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    ~FixtureServer() {
        server.stop();
        thread.join();
    }

    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port); }
};

std::string two_tx_body(fixtures::Mint& mint) {
    fixtures::GraphBuilder b;
    const std::string funder = mint.next();
    b.tx(1000, {{funder, 3 * BTC}}, {{"ADDR", 3 * BTC - 100}});
    b.tx(2000, {{"ADDR", BTC}}, {{mint.next(), BTC - 100}});
    std::string body;
    for (const auto& tx : b.records()) body += ledger::format_tx_record(tx) + "\n";
    return body;
}

} // namespace

TEST_CASE("fetch parses the fixture response and persists a canonical cache") {
    fixtures::Mint mint(21);
    const std::string address = mint.next();
    std::string body = two_tx_body(mint);
    // the service may format records however it likes; 'ADDR' stands in for the
    // requested address and extra whitespace lines are tolerated
    body.insert(body.find('\n') + 1, "\n");
    std::string fixed;
    for (std::size_t i = 0; i < body.size();) {
        if (body.compare(i, 4, "ADDR") == 0) {
            fixed += address;
            i += 4;
        } else {
            fixed += body[i++];
        }
    }

    fixtures::TempDir tmp("fetch");
    FixtureServer server({{address, {200, fixed}}});
    ledger::FetchClient client({server.endpoint(), tmp.path() / "cache", 0.0});

    const auto txs = client.fetch_address_history(address);
    REQUIRE(txs.size() == 2);
    CHECK(server.hits == 1);
    CHECK(client.cached(address));

    // repeat calls come from the cache, no network
    const auto again = client.fetch_address_history(address);
    CHECK(server.hits == 1);
    CHECK(again.size() == 2);

    // cache files are byte-identical across separate fetch runs
    const auto cache_file = tmp.path() / "cache" / (address + ".jsonl");
    std::ifstream f1(cache_file, std::ios::binary);
    std::string first((std::istreambuf_iterator<char>(f1)), {});
    fixtures::TempDir tmp2("fetch2");
    ledger::FetchClient client2({server.endpoint(), tmp2.path() / "cache", 0.0});
    (void)client2.fetch_address_history(address);
    std::ifstream f2(tmp2.path() / "cache" / (address + ".jsonl"), std::ios::binary);
    std::string second((std::istreambuf_iterator<char>(f2)), {});
    CHECK(first == second);
    CHECK_FALSE(first.empty());
}

TEST_CASE("service rejection surfaces the body and is not cached") {
    fixtures::Mint mint(22);
    const std::string address = mint.next();
    fixtures::TempDir tmp("fetch-reject");
    FixtureServer server({{address, {503, "maintenance window"}}});
    ledger::FetchClient client({server.endpoint(), tmp.path() / "cache", 0.0});

    try {
        (void)client.fetch_address_history(address);
        FAIL("expected a service rejection");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Service);
        CHECK(std::string(e.what()).find("maintenance window") != std::string::npos);
    }
    CHECK_FALSE(client.cached(address));
}

TEST_CASE("malformed records are a data error") {
    fixtures::Mint mint(23);
    const std::string address = mint.next();
    fixtures::TempDir tmp("fetch-malformed");
    FixtureServer server({{address, {200, "{\"txid\": \"zz\"}\n"}}});
    ledger::FetchClient client({server.endpoint(), tmp.path() / "cache", 0.0});

    try {
        (void)client.fetch_address_history(address);
        FAIL("expected a data error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Data);
    }
    CHECK_FALSE(client.cached(address));
}

TEST_CASE("concurrent fetches of one address hit the service once") {
    fixtures::Mint mint(24);
    const std::string address = mint.next();
    std::string body = two_tx_body(mint);
    std::string fixed;
    for (std::size_t i = 0; i < body.size();) {
        if (body.compare(i, 4, "ADDR") == 0) {
            fixed += address;
            i += 4;
        } else {
            fixed += body[i++];
        }
    }
    fixtures::TempDir tmp("fetch-concurrent");
    FixtureServer server({{address, {200, fixed}}});
    ledger::FetchClient client({server.endpoint(), tmp.path() / "cache", 0.0});

    std::vector<std::thread> workers;
    std::atomic<int> ok{0};
    for (int i = 0; i < 8; ++i)
        workers.emplace_back([&] {
            if (client.fetch_address_history(address).size() == 2) ++ok;
        });
    for (auto& w : workers) w.join();
    CHECK(ok == 8);
    CHECK(server.hits == 1);
}

TEST_CASE("transport failure is retried then raised as retryable") {
    fixtures::TempDir tmp("fetch-transport");
    // nothing listens here
    ledger::FetchClient client({"http://127.0.0.1:1", tmp.path() / "cache", 0.0, 2});
    try {
        (void)client.fetch_address_history("1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa");
        FAIL("expected a transport error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Transport);
    }
}
