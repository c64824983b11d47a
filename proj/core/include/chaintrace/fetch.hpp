#pragma once

#include "chaintrace/txgraph.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace chaintrace::ledger {

struct FetchConfig {
    std::string endpoint;             // e.g. "http://127.0.0.1:8080"
    std::filesystem::path cache_dir;  // created if missing
    double requests_per_second = 4.0; // 0 disables throttling
    int max_retries = 3;              // transport errors only
};

// Offline-first client for a blockchain-data service exposing
// GET {endpoint}/address/{address} as line-delimited transaction records.
// Every response is re-serialized canonically into {cache_dir}/{address}.jsonl;
// cached addresses are served without touching the network.
class FetchClient {
public:
    explicit FetchClient(FetchConfig config);
    ~FetchClient();

    FetchClient(const FetchClient&) = delete;
    FetchClient& operator=(const FetchClient&) = delete;

    // Throws Error{Transport} after retries are exhausted, Error{Service} for
    // a non-2xx response (body included), Error{Data} for malformed records.
    std::vector<Transaction> fetch_address_history(const std::string& address);

    bool cached(const std::string& address) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace chaintrace::ledger
