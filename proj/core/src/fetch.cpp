#include "chaintrace/fetch.hpp"

#include "chaintrace/error.hpp"

#include <httplib.h>

#include <chrono>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace chaintrace::ledger {

struct FetchClient::Impl {
    FetchConfig config;
    std::mutex mutex; // serializes requests for the rate limit
    std::chrono::steady_clock::time_point last_request{};
    bool any_request = false;

    std::filesystem::path cache_path(const std::string& address) const {
        return config.cache_dir / (address + ".jsonl");
    }

    void throttle() {
        if (config.requests_per_second <= 0 || !any_request) return;
        const auto interval =
            std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                std::chrono::duration<double>(1.0 / config.requests_per_second));
        const auto next_allowed = last_request + interval;
        const auto now = std::chrono::steady_clock::now();
        if (now < next_allowed) std::this_thread::sleep_for(next_allowed - now);
    }

    std::string request_body(const std::string& address) {
        httplib::Client client(config.endpoint);
        client.set_connection_timeout(5);
        client.set_read_timeout(15);

        for (int attempt = 0;; ++attempt) {
            throttle();
            auto res = client.Get("/address/" + address);
            last_request = std::chrono::steady_clock::now();
            any_request = true;
            if (!res) {
                if (attempt + 1 >= config.max_retries)
                    throw Error(ErrorKind::Transport,
                                "transport failure fetching " + address + ": " +
                                    httplib::to_string(res.error()));
                std::this_thread::sleep_for(std::chrono::milliseconds(50 << attempt));
                continue;
            }
            if (res->status < 200 || res->status >= 300)
                throw Error(ErrorKind::Service, "service rejected " + address + " (status " +
                                                    std::to_string(res->status) +
                                                    "): " + res->body);
            return res->body;
        }
    }
};

FetchClient::FetchClient(FetchConfig config) : impl_(std::make_unique<Impl>()) {
    impl_->config = std::move(config);
    std::filesystem::create_directories(impl_->config.cache_dir);
}

FetchClient::~FetchClient() = default;

bool FetchClient::cached(const std::string& address) const {
    return std::filesystem::exists(impl_->cache_path(address));
}

std::vector<Transaction> FetchClient::fetch_address_history(const std::string& address) {
    const auto path = impl_->cache_path(address);
    if (std::filesystem::exists(path)) return read_tx_file(path);

    std::lock_guard lock(impl_->mutex); // serializes the rate limit and the cache fill
    if (std::filesystem::exists(path)) return read_tx_file(path); // filled while waiting

    const std::string body = impl_->request_body(address);
    std::istringstream in(body);
    auto txs = parse_tx_stream(in, "response for " + address);

    // canonical re-serialization keeps cache files byte-stable regardless of
    // upstream formatting; write-then-rename keeps partial files out of the cache
    const auto tmp = path.string() + ".tmp";
    write_tx_file(tmp, txs);
    std::filesystem::rename(tmp, path);
    return txs;
}

} // namespace chaintrace::ledger
