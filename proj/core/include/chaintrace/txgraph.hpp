#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace chaintrace::ledger {

// All values are integer satoshis; 1 BTC == 100'000'000 sats exactly.
constexpr std::int64_t kSatsPerBtc = 100'000'000;

struct TxSlot {
    std::string address; // canonical form
    std::int64_t value_sats = 0;
};

struct Transaction {
    std::string txid; // 64 lowercase hex chars
    std::int64_t timestamp = 0;
    std::vector<TxSlot> inputs; // empty for coinbase
    std::vector<TxSlot> outputs;
    std::int64_t fee_sats = 0;

    bool coinbase() const { return inputs.empty(); }
    std::int64_t input_total() const;
    std::int64_t output_total() const;
};

// Immutable after ingest. Per-address indices hold transaction ids in
// (timestamp, txid) order.
class TxGraph {
public:
    const Transaction& tx(const std::string& txid) const;
    bool contains_tx(const std::string& txid) const { return txs_.count(txid) != 0; }
    bool contains_address(const std::string& address) const;

    // transactions with an output slot paying the address
    const std::vector<std::string>& funding_txids(const std::string& address) const;
    // transactions spending from the address (address appears in inputs)
    const std::vector<std::string>& spending_txids(const std::string& address) const;

    std::int64_t first_seen(const std::string& address) const;

    const std::map<std::string, Transaction>& transactions() const { return txs_; }
    std::vector<std::string> addresses() const; // sorted

    std::size_t tx_count() const { return txs_.size(); }

private:
    friend TxGraph ingest(const std::vector<Transaction>& records);
    std::map<std::string, Transaction> txs_;
    std::map<std::string, std::vector<std::string>> funding_;
    std::map<std::string, std::vector<std::string>> spending_;
    std::map<std::string, std::int64_t> first_seen_;
};

// Validates each record (conservation: inputs == outputs + fee, waived for
// coinbase), rejects conflicting duplicate txids, and builds the indices.
// Re-ingesting an identical record is idempotent.
TxGraph ingest(const std::vector<Transaction>& records);

// Sum of all output slot values paying the address. Throws on unknown address.
std::int64_t received_total(const TxGraph& g, const std::string& address);

// Line-delimited JSON {txid, time, inputs: [{addr, value_sats}], outputs: [...],
// fee_sats}. parse_* validates shape only; ingest() enforces graph invariants.
Transaction parse_tx_record(const std::string& line, const std::string& where);
std::vector<Transaction> read_tx_file(const std::filesystem::path& path);
std::vector<Transaction> parse_tx_stream(std::istream& in, const std::string& source_name);
std::string format_tx_record(const Transaction& tx); // canonical, key-sorted
void write_tx_file(const std::filesystem::path& path, const std::vector<Transaction>& txs);

} // namespace chaintrace::ledger
