#pragma once

// Shared test scaffolding: a terse transaction-graph builder, deterministic
// address minting, and temp-dir management.

#include "chaintrace/address.hpp"
#include "chaintrace/txgraph.hpp"
#include "chaintrace/valuation.hpp"

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace fixtures {

inline constexpr std::int64_t BTC = chaintrace::ledger::kSatsPerBtc;

// fresh valid p2pkh addresses, deterministic per seed
class Mint {
public:
    explicit Mint(std::uint64_t seed = 1) : rng_(seed) {}

    std::string next() {
        std::vector<std::uint8_t> payload{0x00};
        for (int i = 0; i < 20; ++i) payload.push_back(std::uint8_t(rng_()));
        return chaintrace::addr::encode(chaintrace::addr::Encoding::Base58Check, payload);
    }

private:
    std::mt19937_64 rng_;
};

class GraphBuilder {
public:
    using Slot = chaintrace::ledger::TxSlot;

    // fee derived from the imbalance; coinbase when inputs are empty
    GraphBuilder& tx(std::int64_t timestamp, std::vector<Slot> inputs, std::vector<Slot> outputs) {
        chaintrace::ledger::Transaction t;
        char buf[80];
        std::snprintf(buf, sizeof buf, "%064zx", txs_.size() + 1);
        t.txid = buf;
        t.timestamp = timestamp;
        std::int64_t in = 0, out = 0;
        for (const auto& s : inputs) in += s.value_sats;
        for (const auto& s : outputs) out += s.value_sats;
        t.fee_sats = inputs.empty() ? 0 : in - out;
        t.inputs = std::move(inputs);
        t.outputs = std::move(outputs);
        txs_.push_back(std::move(t));
        return *this;
    }

    const std::string& last_txid() const { return txs_.back().txid; }
    const std::vector<chaintrace::ledger::Transaction>& records() const { return txs_; }
    chaintrace::ledger::TxGraph graph() const { return chaintrace::ledger::ingest(txs_); }

private:
    std::vector<chaintrace::ledger::Transaction> txs_;
};

// flat rate table covering [first, last] at a fixed close
inline chaintrace::valuation::RateTable flat_rates(chaintrace::CivilDate first,
                                                   chaintrace::CivilDate last,
                                                   std::int64_t cents) {
    chaintrace::valuation::RateTable table;
    for (std::int64_t d = chaintrace::days_from_civil(first);
         d <= chaintrace::days_from_civil(last); ++d)
        table.insert(chaintrace::civil_from_days(d), {cents, 2});
    return table;
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("chaintrace-test-" + tag + "-" + std::to_string(::getpid()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

} // namespace fixtures
